/** Typed client for the recommendation service HTTP API. */

export type Verdict = "helpful" | "not_helpful";

export interface Recommendation {
  external_id: string;
  score: number;
  title: string;
  solution: string | null;
}

export interface SubmitResponse {
  ticket_id: string;
  recommendations: Recommendation[];
}

export interface FeedbackRecord {
  query_ticket_id: string;
  recommended_ids: string[];
  verdict: Verdict;
  technique: string;
  timestamp: string;
}

export interface HealthInfo {
  status: string;
  technique: string;
  index_size: number;
}

/** The service answered with a non-2xx status. */
export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`service answered ${status}: ${detail}`);
  }
}

/** The service could not be reached at all. */
export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

async function parseDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    return typeof body.detail === "string" ? body.detail : JSON.stringify(body);
  } catch {
    return response.statusText;
  }
}

export class ServiceClient {
  constructor(private readonly baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (cause) {
      throw new ServiceUnreachable(cause);
    }
    if (!response.ok) {
      throw new ApiError(response.status, await parseDetail(response));
    }
    return response;
  }

  async submitTicket(title: string, description: string): Promise<SubmitResponse> {
    const response = await this.request("/tickets", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ title, description }),
    });
    return (await response.json()) as SubmitResponse;
  }

  async recordFeedback(record: {
    query_ticket_id: string;
    recommended_ids: string[];
    verdict: Verdict;
    technique: string;
  }): Promise<void> {
    await this.request("/feedback", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
  }

  async listFeedback(): Promise<FeedbackRecord[]> {
    const response = await this.request("/feedback");
    return (await response.json()) as FeedbackRecord[];
  }

  async health(): Promise<HealthInfo> {
    const response = await this.request("/health");
    return (await response.json()) as HealthInfo;
  }
}
