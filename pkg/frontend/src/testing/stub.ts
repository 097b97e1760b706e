/** In-process stub of the recommendation service for tests. */

import http from "node:http";
import type { AddressInfo } from "node:net";
import type { Recommendation } from "../api.js";

export interface StubState {
  submits: number;
  feedback: Array<Record<string, unknown>>;
  failFeedback: boolean;
  recommendations: Recommendation[];
}

export interface StubHandle {
  url: string;
  state: StubState;
  close(): Promise<void>;
}

export const DEFAULT_RECOMMENDATIONS: Recommendation[] = [
  { external_id: "T4", score: 0.93, title: "printer jammed", solution: "cleared tray 2" },
  { external_id: "T1", score: 0.81, title: "printer toner", solution: "replaced toner" },
  { external_id: "T9", score: 0.44, title: "printer offline", solution: null },
  { external_id: "T2", score: 0.1, title: "vpn drops", solution: "reissued cert" },
  { external_id: "T7", score: 0.02, title: "password reset", solution: "reset in portal" },
];

function readBody(request: http.IncomingMessage): Promise<string> {
  return new Promise((resolve) => {
    let data = "";
    request.on("data", (chunk) => (data += chunk));
    request.on("end", () => resolve(data));
  });
}

export async function startStub(
  recommendations: Recommendation[] = DEFAULT_RECOMMENDATIONS,
): Promise<StubHandle> {
  const state: StubState = {
    submits: 0,
    feedback: [],
    failFeedback: false,
    recommendations,
  };

  const server = http.createServer(async (request, response) => {
    const send = (status: number, body: unknown) => {
      const payload = JSON.stringify(body);
      response.writeHead(status, { "Content-Type": "application/json" });
      response.end(payload);
    };
    if (request.method === "POST" && request.url === "/tickets") {
      state.submits += 1;
      send(200, {
        ticket_id: `live-${String(state.submits).padStart(6, "0")}`,
        recommendations: state.recommendations,
      });
    } else if (request.method === "POST" && request.url === "/feedback") {
      if (state.failFeedback) {
        send(500, { detail: "journal write failed" });
        return;
      }
      const body = JSON.parse(await readBody(request));
      state.feedback.push({ ...body, timestamp: "2024-01-01T00:00:00+00:00" });
      send(201, state.feedback[state.feedback.length - 1]);
    } else if (request.method === "GET" && request.url === "/feedback") {
      send(200, state.feedback);
    } else if (request.method === "GET" && request.url === "/health") {
      send(200, { status: "ok", technique: "tfidf", index_size: 300 });
    } else {
      send(404, { detail: "no such route" });
    }
  });

  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const { port } = server.address() as AddressInfo;
  return {
    url: `http://127.0.0.1:${port}`,
    state,
    close: () =>
      new Promise((resolve, reject) =>
        server.close((error) => (error ? reject(error) : resolve())),
      ),
  };
}

/** A base URL nothing listens on, for service-down scenarios. */
export async function deadEndpoint(): Promise<string> {
  const probe = http.createServer();
  await new Promise<void>((resolve) => probe.listen(0, "127.0.0.1", resolve));
  const { port } = probe.address() as AddressInfo;
  await new Promise<void>((resolve) => probe.close(() => resolve()));
  return `http://127.0.0.1:${port}`;
}
