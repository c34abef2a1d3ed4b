/** Thin typed client for the three server endpoints. */

import type { FrontPayload, InferResponse, Meta } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status?: number
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args)
  ) {}

  private url(path: string): string {
    return this.base.replace(/\/+$/, "") + path;
  }

  private async get<T>(path: string): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.url(path));
    } catch (err) {
      throw new ApiError(`server unreachable: ${String(err)}`);
    }
    if (!resp.ok) throw new ApiError(`${path} failed`, resp.status);
    return (await resp.json()) as T;
  }

  meta(): Promise<Meta> {
    return this.get<Meta>("/meta");
  }

  front(samples: number): Promise<FrontPayload> {
    return this.get<FrontPayload>(`/front?samples=${samples}`);
  }

  async infer(preference: number[]): Promise<InferResponse> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.url("/infer"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ preference }),
      });
    } catch (err) {
      throw new ApiError(`server unreachable: ${String(err)}`);
    }
    if (!resp.ok) throw new ApiError("/infer failed", resp.status);
    return (await resp.json()) as InferResponse;
  }
}
