/** View models for the recommendation cards, independent of the DOM. */

import type { Recommendation, Verdict } from "./api.js";

export type FeedbackState = "none" | Verdict;

export interface RecommendationView {
  externalId: string;
  /** Score rendered to 3 decimals for display. */
  scoreText: string;
  score: number;
  title: string;
  solution: string;
  feedback: FeedbackState;
  /** True when a cosine-bounded technique reported a score outside [-1, 1]. */
  contractViolation: boolean;
}

const MAX_CARDS = 5;

/** Techniques whose scores legitimately leave [-1, 1]. */
export function scoreIsBounded(technique: string): boolean {
  return !technique.toLowerCase().includes("bm25");
}

export function buildRecommendationViews(
  recommendations: Recommendation[],
  technique: string,
): RecommendationView[] {
  const bounded = scoreIsBounded(technique);
  return recommendations.slice(0, MAX_CARDS).map((r) => ({
    externalId: r.external_id,
    scoreText: r.score.toFixed(3),
    score: r.score,
    title: r.title,
    solution: r.solution ?? "(no recorded solution)",
    feedback: "none" as FeedbackState,
    contractViolation: bounded && (r.score < -1 || r.score > 1),
  }));
}

/** none -> verdict is the only legal transition; anything else is ignored. */
export function applyVerdict(
  view: RecommendationView,
  verdict: Verdict,
): RecommendationView {
  if (view.feedback !== "none") {
    return view;
  }
  return { ...view, feedback: verdict };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderCards(views: RecommendationView[]): string {
  if (views.length === 0) {
    return '<p class="empty">No recommendations.</p>';
  }
  return views
    .map((view, index) => {
      const warning = view.contractViolation
        ? '<span class="contract-warning">score outside [-1, 1]</span>'
        : "";
      const state =
        view.feedback === "none"
          ? `<button data-card="${index}" data-verdict="helpful">Helpful</button>
             <button data-card="${index}" data-verdict="not_helpful">Not helpful</button>`
          : `<span class="verdict">${view.feedback}</span>`;
      return `<article class="card" data-id="${escapeHtml(view.externalId)}">
  <header><strong>${escapeHtml(view.title)}</strong>
    <span class="score">${view.scoreText}</span> ${warning}</header>
  <p class="solution">${escapeHtml(view.solution)}</p>
  <footer>${state}</footer>
</article>`;
    })
    .join("\n");
}

export function renderBanner(message: string | null): string {
  if (message === null) {
    return "";
  }
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function renderHeader(technique: string, indexSize: number): string {
  return `technique: ${escapeHtml(technique)} &middot; indexed tickets: ${indexSize}`;
}
