import type {
  Lineage,
  QueuePage,
  ReviewRequest,
  ReviewResult,
  TaxonomyDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx answer from the service, with the parsed body attached. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: Record<string, unknown>,
  ) {
    super(typeof body["detail"] === "string" ? (body["detail"] as string) : `HTTP ${status}`);
    this.name = "ApiError";
  }

  /** Server-reported current state; present on 409 review conflicts. */
  get state(): string | undefined {
    return typeof this.body["state"] === "string" ? (this.body["state"] as string) : undefined;
  }
}

/** The service is unreachable (fetch itself failed). */
export class ConnectionError extends Error {
  constructor(cause: unknown) {
    super(cause instanceof Error ? cause.message : String(cause));
    this.name = "ConnectionError";
  }
}

export interface ApiOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: FetchLike;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token: string | undefined;
  private readonly fetchImpl: FetchLike;

  constructor(options: ApiOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/+$/, "");
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? globalThis.fetch.bind(globalThis);
  }

  listCopies(jobId: string, state?: string): Promise<QueuePage> {
    const params = new URLSearchParams({ job_id: jobId });
    if (state) params.set("state", state);
    return this.request<QueuePage>("GET", `/api/copies?${params}`);
  }

  getCopy(copyId: string): Promise<Lineage> {
    return this.request<Lineage>("GET", `/api/copies/${encodeURIComponent(copyId)}`);
  }

  getTaxonomy(): Promise<TaxonomyDoc> {
    return this.request<TaxonomyDoc>("GET", "/api/taxonomy");
  }

  submitReview(copyId: string, review: ReviewRequest): Promise<ReviewResult> {
    return this.request<ReviewResult>(
      "POST",
      `/api/copies/${encodeURIComponent(copyId)}/review`,
      review,
    );
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { accept: "application/json" };
    if (this.token) headers["X-Api-Token"] = this.token;
    if (body !== undefined) headers["content-type"] = "application/json";

    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ConnectionError(err);
    }

    let parsed: unknown = {};
    try {
      parsed = await response.json();
    } catch {
      // non-JSON bodies fall through as an empty object
    }
    const record = (parsed && typeof parsed === "object" ? parsed : {}) as Record<
      string,
      unknown
    >;
    if (!response.ok) {
      throw new ApiError(response.status, record);
    }
    return record as T;
  }
}
