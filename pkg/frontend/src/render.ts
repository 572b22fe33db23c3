// Pure HTML-string builders. No DOM access and no state: the controller
// composes these and hands one full document fragment to its host, which
// keeps every visual decision unit-testable in node.

import type { CopySummary, TrailRow } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export const CUSTOM_CODE = "__custom__";

export function renderTrail(rows: TrailRow[]): string {
  if (rows.length === 0) {
    return `<p class="trail-empty">No evaluations recorded.</p>`;
  }
  const items = rows.map((row) => {
    const mark = row.pass ? "✓" : "✗";
    const cls = row.pass ? "pass" : "fail";
    // passing outcomes carry the sentinel code "pass"; the check mark already says so
    const reason =
      row.reason_code && row.reason_code !== "pass"
        ? `<code class="reason">${escapeHtml(row.reason_code)}</code>`
        : "";
    const narrative = row.narrative
      ? `<span class="narrative">${escapeHtml(row.narrative)}</span>`
      : "";
    return (
      `<li class="trail-row ${cls}">` +
      `<span class="mark">${mark}</span> ` +
      `<span class="evaluator">${escapeHtml(row.evaluator_id)}</span>` +
      `<span class="round">round ${row.plan_round}</span>` +
      `${reason}${narrative}</li>`
    );
  });
  return `<ul class="trail">${items.join("")}</ul>`;
}

function renderComponents(components: Record<string, string>): string {
  const rows = Object.entries(components).map(
    ([name, text]) =>
      `<dt>${escapeHtml(name)}</dt><dd class="copy-text">${escapeHtml(text)}</dd>`,
  );
  return `<dl class="components">${rows.join("")}</dl>`;
}

function renderReasonOptions(codes: string[]): string {
  const options = codes.map(
    (code) => `<option value="${escapeHtml(code)}">${escapeHtml(code)}</option>`,
  );
  options.push(`<option value="${CUSTOM_CODE}">other…</option>`);
  return options.join("");
}

export function renderCard(copy: CopySummary, reasonCodes: string[]): string {
  const persona = copy.persona
    ? `<p class="persona">Audience: ${escapeHtml(copy.persona)}</p>`
    : "";
  return (
    `<article class="card" data-copy-id="${escapeHtml(copy.copy_id)}">` +
    `<header class="card-head">` +
    `<span class="copy-id">${escapeHtml(copy.copy_id)}</span>` +
    `<span class="usecase">${escapeHtml(copy.usecase_id)}</span>` +
    `<span class="refines">refined ${copy.refine_count}/${copy.max_refines}</span>` +
    `</header>` +
    renderComponents(copy.components) +
    persona +
    renderTrail(copy.trail) +
    `<footer class="actions">` +
    `<button type="button" class="approve" data-action="approve">Approve</button>` +
    `<select class="reason-code" aria-label="rejection reason">` +
    renderReasonOptions(reasonCodes) +
    `</select>` +
    `<input class="custom-code" type="text" placeholder="custom reason code" hidden>` +
    `<input class="note" type="text" placeholder="note (optional)">` +
    `<button type="button" class="reject" data-action="reject">Reject</button>` +
    `</footer>` +
    `</article>`
  );
}

export function renderErrorBanner(message: string): string {
  return (
    `<div class="banner error" role="alert">` +
    `<span>${escapeHtml(message)}</span>` +
    `<button type="button" data-action="retry">Retry</button>` +
    `</div>`
  );
}

export function renderNotice(message: string): string {
  return `<div class="banner notice" role="status">${escapeHtml(message)}</div>`;
}

export function renderEmptyState(): string {
  return `<p class="empty">Queue is empty. Nothing is waiting for review.</p>`;
}

export interface QueueView {
  jobId: string;
  cards: string[];
  page: number;
  pageCount: number;
  banner?: string;
  notice?: string;
}

export function renderPager(page: number, pageCount: number): string {
  if (pageCount <= 1) return "";
  return (
    `<nav class="pager">` +
    `<button type="button" data-action="prev-page" ${page === 0 ? "disabled" : ""}>Prev</button>` +
    `<span>page ${page + 1} of ${pageCount}</span>` +
    `<button type="button" data-action="next-page" ${page + 1 >= pageCount ? "disabled" : ""}>Next</button>` +
    `</nav>`
  );
}

export function renderQueue(view: QueueView): string {
  const parts: string[] = [];
  if (view.banner) parts.push(renderErrorBanner(view.banner));
  if (view.notice) parts.push(renderNotice(view.notice));
  parts.push(`<h2 class="job">Pending review · job ${escapeHtml(view.jobId)}</h2>`);
  if (view.cards.length === 0 && !view.banner) {
    parts.push(renderEmptyState());
  } else {
    parts.push(`<section class="queue">${view.cards.join("")}</section>`);
  }
  parts.push(renderPager(view.page, view.pageCount));
  return parts.join("");
}
