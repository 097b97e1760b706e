/** Browser bootstrap: wires the console controller to the page. */

import { ServiceClient } from "./api.js";
import { ConsoleController } from "./console.js";
import { renderBanner, renderCards, renderHeader } from "./view.js";

const BASE_URL = (window as { TICKETREC_BASE_URL?: string }).TICKETREC_BASE_URL ?? "";

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

function paint(controller: ConsoleController): void {
  element("banner").innerHTML = renderBanner(controller.banner);
  element("cards").innerHTML = renderCards(controller.views);
  element("status").innerHTML = renderHeader(controller.technique, controller.indexSize);
}

async function start(): Promise<void> {
  const controller = new ConsoleController(new ServiceClient(BASE_URL));
  await controller.refreshHealth();
  paint(controller);

  const form = element<HTMLFormElement>("submit-form");
  const validation = element("validation");
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const title = element<HTMLInputElement>("title").value;
    const description = element<HTMLTextAreaElement>("description").value;
    const outcome = await controller.submit(title, description);
    validation.textContent = outcome.kind === "invalid" ? outcome.message : "";
    paint(controller);
  });

  element("cards").addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    const card = target.dataset.card;
    const verdict = target.dataset.verdict;
    if (card === undefined || verdict === undefined) {
      return;
    }
    await controller.feedback(Number(card), verdict as "helpful" | "not_helpful");
    paint(controller);
  });
}

window.addEventListener("DOMContentLoaded", () => {
  void start();
});
