/** Serializes feedback requests: concurrent clicks queue up and are sent
 * one at a time, in click order. */

export class FeedbackQueue {
  private tail: Promise<unknown> = Promise.resolve();
  private pending = 0;

  enqueue<T>(task: () => Promise<T>): Promise<T> {
    this.pending += 1;
    const result = this.tail.then(task).finally(() => {
      this.pending -= 1;
    });
    // Failures must not wedge the queue; callers see them via `result`.
    this.tail = result.catch(() => undefined);
    return result;
  }

  get size(): number {
    return this.pending;
  }
}
