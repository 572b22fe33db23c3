// Browser shell: wires DOM events to the controller. Everything below is
// glue; behavior lives in app.ts so the suite can drive it without a DOM.

import { ApiClient } from "./api.js";
import { CUSTOM_CODE } from "./render.js";
import { ReviewApp } from "./app.js";

function readSession(key: string): string {
  try {
    return sessionStorage.getItem(key) ?? "";
  } catch {
    return "";
  }
}

function writeSession(key: string, value: string): void {
  try {
    sessionStorage.setItem(key, value);
  } catch {
    // storage may be unavailable; connecting again is cheap
  }
}

function start(): void {
  const root = document.getElementById("app");
  const form = document.getElementById("connect") as HTMLFormElement | null;
  const tokenInput = document.getElementById("token") as HTMLInputElement | null;
  const jobInput = document.getElementById("job-id") as HTMLInputElement | null;
  if (!root || !form || !tokenInput || !jobInput) return;

  tokenInput.value = readSession("copyforge.token");
  jobInput.value = readSession("copyforge.job");

  let app: ReviewApp | null = null;

  const connect = () => {
    const jobId = jobInput.value.trim();
    if (!jobId) return;
    writeSession("copyforge.token", tokenInput.value);
    writeSession("copyforge.job", jobId);
    const api = new ApiClient({ token: tokenInput.value.trim() || undefined });
    app = new ReviewApp(api, {
      render: (html) => {
        root.innerHTML = html;
      },
    });
    void app.load(jobId);
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    connect();
  });

  root.addEventListener("change", (event) => {
    const select = event.target as HTMLElement;
    if (!(select instanceof HTMLSelectElement) || !select.classList.contains("reason-code")) {
      return;
    }
    const card = select.closest<HTMLElement>("[data-copy-id]");
    const custom = card?.querySelector<HTMLInputElement>(".custom-code");
    if (custom) custom.hidden = select.value !== CUSTOM_CODE;
  });

  root.addEventListener("click", (event) => {
    if (!app) return;
    const button = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!button) return;
    const action = button.dataset["action"];
    if (action === "retry") {
      void app.refresh();
      return;
    }
    if (action === "next-page") {
      app.nextPage();
      return;
    }
    if (action === "prev-page") {
      app.prevPage();
      return;
    }
    const card = button.closest<HTMLElement>("[data-copy-id]");
    const copyId = card?.dataset["copyId"];
    if (!card || !copyId) return;
    if (action === "approve") {
      void app.approve(copyId);
    } else if (action === "reject") {
      const select = card.querySelector<HTMLSelectElement>(".reason-code");
      const custom = card.querySelector<HTMLInputElement>(".custom-code");
      const note = card.querySelector<HTMLInputElement>(".note");
      let reason = select?.value ?? "";
      if (reason === CUSTOM_CODE) reason = custom?.value.trim() ?? "";
      void app.reject(copyId, reason || undefined, note?.value.trim() || undefined);
    }
  });

  if (jobInput.value.trim()) connect();
}

start();
