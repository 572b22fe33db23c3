import { ApiClient, ApiError, ConnectionError } from "./api.js";
import { renderCard, renderQueue } from "./render.js";
import type { CopySummary, ReviewRequest } from "./types.js";

/** Where rendered HTML goes; the browser shell sets innerHTML, tests collect strings. */
export interface ViewHost {
  render(html: string): void;
}

export const PAGE_SIZE = 10;
const PENDING = "pending_human_review";

function describeError(err: unknown): string {
  if (err instanceof ConnectionError) {
    return `Cannot reach the service: ${err.message}`;
  }
  if (err instanceof ApiError) {
    return `Service error ${err.status}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

/**
 * Review-queue controller. The server is the source of truth: submissions
 * remove cards optimistically, and a 409 (someone else already decided the
 * copy) resyncs the whole queue instead of guessing.
 */
export class ReviewApp {
  private jobId = "";
  private copies: CopySummary[] = [];
  private codes: string[] = [];
  private page = 0;
  private banner: string | null = null;
  private notice: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly host: ViewHost,
  ) {}

  async load(jobId: string): Promise<void> {
    this.jobId = jobId;
    this.notice = null;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    try {
      const [taxonomy, queue] = await Promise.all([
        this.api.getTaxonomy(),
        this.api.listCopies(this.jobId, PENDING),
      ]);
      this.codes = taxonomy.codes.filter(
        (code) => code !== "pass" && !code.endsWith("*"),
      );
      this.copies = queue.copies;
      this.banner = null;
    } catch (err) {
      this.banner = describeError(err);
    }
    this.paint();
  }

  async approve(copyId: string): Promise<void> {
    await this.submit(copyId, { verdict: "approve" });
  }

  async reject(copyId: string, reasonCode?: string, note?: string): Promise<void> {
    const review: ReviewRequest = { verdict: "reject" };
    if (reasonCode) review.reason_code = reasonCode;
    if (note) review.note = note;
    await this.submit(copyId, review);
  }

  nextPage(): void {
    this.page += 1;
    this.paint();
  }

  prevPage(): void {
    this.page -= 1;
    this.paint();
  }

  pendingIds(): string[] {
    return this.copies.map((copy) => copy.copy_id);
  }

  currentBanner(): string | null {
    return this.banner;
  }

  currentNotice(): string | null {
    return this.notice;
  }

  reasonCodes(): string[] {
    return [...this.codes];
  }

  private async submit(copyId: string, review: ReviewRequest): Promise<void> {
    try {
      const result = await this.api.submitReview(copyId, review);
      this.copies = this.copies.filter((copy) => copy.copy_id !== copyId);
      this.notice = `${copyId} recorded as ${result.state}`;
      this.paint();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.notice = `${copyId} was already decided (now ${err.state ?? "unknown"}); queue refreshed`;
        await this.refresh();
      } else {
        this.banner = describeError(err);
        this.paint();
      }
    }
  }

  private paint(): void {
    const pageCount = Math.max(1, Math.ceil(this.copies.length / PAGE_SIZE));
    this.page = Math.min(Math.max(this.page, 0), pageCount - 1);
    const start = this.page * PAGE_SIZE;
    const cards = this.copies
      .slice(start, start + PAGE_SIZE)
      .map((copy) => renderCard(copy, this.codes));
    this.host.render(
      renderQueue({
        jobId: this.jobId,
        cards,
        page: this.page,
        pageCount,
        banner: this.banner ?? undefined,
        notice: this.notice ?? undefined,
      }),
    );
  }
}
