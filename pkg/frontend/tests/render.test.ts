import { describe, expect, it } from "vitest";

import {
  CUSTOM_CODE,
  escapeHtml,
  renderCard,
  renderEmptyState,
  renderErrorBanner,
  renderPager,
  renderQueue,
  renderTrail,
} from "../src/render.js";
import { makeCopy } from "./fixture-service.js";

const CODES = ["length.exceeded", "lexical.avoided_term"];

describe("escapeHtml", () => {
  it("neutralizes markup and quotes", () => {
    expect(escapeHtml(`<b onclick="x('y')">&`)).toBe(
      "&lt;b onclick=&quot;x(&#39;y&#39;)&quot;&gt;&amp;",
    );
  });
});

describe("renderCard", () => {
  it("shows components, ids, refine budget, and action controls", () => {
    const copy = makeCopy("c0001", "Fresh bread daily").summary;
    copy.refine_count = 1;
    const html = renderCard(copy, CODES);
    expect(html).toContain('data-copy-id="c0001"');
    expect(html).toContain("Fresh bread daily");
    expect(html).toContain("<dt>header</dt>");
    expect(html).toContain("fixture-case");
    expect(html).toContain("refined 1/1");
    expect(html).toContain('data-action="approve"');
    expect(html).toContain('data-action="reject"');
  });

  it("offers the taxonomy codes plus a custom entry in the reject dropdown", () => {
    const html = renderCard(makeCopy("c1", "x").summary, CODES);
    for (const code of CODES) {
      expect(html).toContain(`<option value="${code}">`);
    }
    expect(html).toContain(`<option value="${CUSTOM_CODE}">other…</option>`);
  });

  it("renders the persona line only when present", () => {
    const withPersona = makeCopy("c1", "x", { persona: "busy pet owners" }).summary;
    expect(renderCard(withPersona, CODES)).toContain("Audience: busy pet owners");
    expect(renderCard(makeCopy("c2", "x").summary, CODES)).not.toContain("Audience:");
  });

  it("escapes copy content so text cannot inject markup", () => {
    const hostile = makeCopy("c1", `<script>alert("pwn")</script>`).summary;
    const html = renderCard(hostile, CODES);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("renderTrail", () => {
  it("marks passes and failures with reason and narrative", () => {
    const html = renderTrail([
      { evaluator_id: "length", pass: false, plan_round: 0, reason_code: "length.exceeded", narrative: "too long" },
      { evaluator_id: "length", pass: true, plan_round: 1, reason_code: null, narrative: null },
    ]);
    expect(html).toContain("✗");
    expect(html).toContain("✓");
    expect(html).toContain("length.exceeded");
    expect(html).toContain("too long");
    expect(html).toContain("round 0");
    expect(html).toContain("round 1");
  });

  it("suppresses the sentinel pass code; the mark already says it", () => {
    const html = renderTrail([
      { evaluator_id: "length", pass: true, plan_round: 0, reason_code: "pass", narrative: "" },
    ]);
    expect(html).not.toContain('<code class="reason">');
  });

  it("says so when no evaluations exist", () => {
    expect(renderTrail([])).toContain("No evaluations recorded");
  });
});

describe("renderQueue", () => {
  it("shows the empty state when there are no cards and no error", () => {
    const html = renderQueue({ jobId: "job-1", cards: [], page: 0, pageCount: 1 });
    expect(html).toContain(renderEmptyState());
    expect(html).toContain("job-1");
  });

  it("prefers the error banner over the empty state", () => {
    const html = renderQueue({
      jobId: "job-1",
      cards: [],
      page: 0,
      pageCount: 1,
      banner: "Cannot reach the service",
    });
    expect(html).toContain("Cannot reach the service");
    expect(html).toContain('data-action="retry"');
    expect(html).not.toContain("Queue is empty");
  });
});

describe("renderPager", () => {
  it("is absent for a single page", () => {
    expect(renderPager(0, 1)).toBe("");
  });

  it("disables the edge buttons", () => {
    const first = renderPager(0, 3);
    expect(first).toContain('data-action="prev-page" disabled');
    expect(first).toContain("page 1 of 3");
    const last = renderPager(2, 3);
    expect(last).toContain('data-action="next-page" disabled');
  });
});

describe("renderErrorBanner", () => {
  it("carries a retry control", () => {
    const html = renderErrorBanner("boom");
    expect(html).toContain("boom");
    expect(html).toContain('data-action="retry"');
  });
});
