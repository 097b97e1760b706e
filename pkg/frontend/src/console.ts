/** The analyst console's state machine, kept free of DOM concerns so it is
 * fully testable against a stub server. All state is rebuilt from API
 * responses; a page refresh loses nothing the service remembers. */

import {
  ApiError,
  ServiceClient,
  ServiceUnreachable,
  type Verdict,
} from "./api.js";
import { FeedbackQueue } from "./queue.js";
import {
  applyVerdict,
  buildRecommendationViews,
  type RecommendationView,
} from "./view.js";

export type SubmitOutcome =
  | { kind: "ok"; ticketId: string }
  | { kind: "invalid"; message: string }
  | { kind: "error"; message: string };

export type FeedbackOutcome = "acknowledged" | "ignored" | "failed";

export class ConsoleController {
  views: RecommendationView[] = [];
  banner: string | null = null;
  technique = "";
  indexSize = 0;
  queryTicketId: string | null = null;

  private readonly queue = new FeedbackQueue();

  constructor(private readonly client: ServiceClient) {}

  async refreshHealth(): Promise<void> {
    try {
      const health = await this.client.health();
      this.technique = health.technique;
      this.indexSize = health.index_size;
      this.banner = null;
    } catch (cause) {
      this.banner = describe(cause);
    }
  }

  /** Submit the form. Client-side validation: an all-empty form never
   * reaches the service. */
  async submit(title: string, description: string): Promise<SubmitOutcome> {
    if (title.trim() === "" && description.trim() === "") {
      return { kind: "invalid", message: "enter a title or a description" };
    }
    try {
      const response = await this.client.submitTicket(title, description);
      this.views = buildRecommendationViews(response.recommendations, this.technique);
      this.queryTicketId = response.ticket_id;
      this.banner = null;
      return { kind: "ok", ticketId: response.ticket_id };
    } catch (cause) {
      this.banner = describe(cause);
      return { kind: "error", message: this.banner };
    }
  }

  /** Record a verdict for one card. The card state changes only after the
   * service acknowledges; a failed POST leaves it clickable for retry. */
  feedback(cardIndex: number, verdict: Verdict): Promise<FeedbackOutcome> {
    return this.queue.enqueue(async () => {
      const view = this.views[cardIndex];
      if (view === undefined || this.queryTicketId === null) {
        return "ignored";
      }
      if (view.feedback !== "none") {
        return "ignored"; // none -> verdict is the only transition
      }
      try {
        await this.client.recordFeedback({
          query_ticket_id: this.queryTicketId,
          recommended_ids: this.views.map((v) => v.externalId),
          verdict,
          technique: this.technique,
        });
      } catch (cause) {
        this.banner = describe(cause);
        return "failed";
      }
      this.views = this.views.map((v, i) =>
        i === cardIndex ? applyVerdict(v, verdict) : v,
      );
      return "acknowledged";
    });
  }
}

function describe(cause: unknown): string {
  if (cause instanceof ServiceUnreachable) {
    return "The recommendation service is unreachable. Check that it is running.";
  }
  if (cause instanceof ApiError) {
    return cause.message;
  }
  return `unexpected error: ${String(cause)}`;
}
