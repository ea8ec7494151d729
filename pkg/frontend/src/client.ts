/** Debounced completion client with latest-wins response ordering.
 *
 * At most one request is in flight; issuing a new one aborts the previous.
 * Every issued request gets a sequence number and a response is delivered
 * only while its number is still the newest, so a slow early reply can
 * never overwrite a fast later one.
 */

import type { CompletionRequest, CompletionResponse } from "./types.js";

export interface ClientOptions {
  baseUrl: string;
  debounceMs?: number;
  /** Injectable for tests; defaults to the global fetch. */
  fetchFn?: typeof fetch;
}

export interface ClientCallbacks {
  onSuggestions: (response: CompletionResponse) => void;
  onError: (message: string) => void;
}

export class CompletionClient {
  private readonly baseUrl: string;
  private readonly debounceMs: number;
  private readonly fetchFn: typeof fetch;
  private readonly callbacks: ClientCallbacks;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private seq = 0;

  constructor(options: ClientOptions, callbacks: ClientCallbacks) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.debounceMs = options.debounceMs ?? 150;
    this.fetchFn = options.fetchFn ?? ((...args) => fetch(...args));
    this.callbacks = callbacks;
  }

  /** Debounce a request: rapid calls collapse to one fetch. */
  schedule(request: CompletionRequest): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.issue(request);
    }, this.debounceMs);
  }

  /** Drop anything scheduled or in flight; late replies become stale. */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.controller?.abort();
    this.controller = null;
    this.seq += 1;
  }

  private async issue(request: CompletionRequest): Promise<void> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    this.seq += 1;
    const mine = this.seq;
    try {
      const response = await this.fetchFn(`${this.baseUrl}/api/complete`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
        signal: controller.signal,
      });
      if (mine !== this.seq) return; // a newer request has been issued
      if (!response.ok) {
        this.callbacks.onError(`completion failed (HTTP ${response.status})`);
        return;
      }
      const payload = (await response.json()) as CompletionResponse;
      if (mine !== this.seq) return; // became stale while parsing
      this.callbacks.onSuggestions(payload);
    } catch (err) {
      if (controller.signal.aborted) return; // superseded, stay quiet
      if (mine !== this.seq) return;
      const reason = err instanceof Error ? err.message : String(err);
      this.callbacks.onError(`completion request failed: ${reason}`);
    }
  }
}
