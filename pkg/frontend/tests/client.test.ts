import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { CompletionClient } from "../src/client.js";
import { initialState, onKeystroke, requestFor } from "../src/state.js";
import type { CompletionRequest, CompletionResponse } from "../src/types.js";

interface PendingCall {
  url: string;
  body: CompletionRequest;
  signal: AbortSignal;
  resolve: (response: Response) => void;
  reject: (reason: unknown) => void;
}

/** fetch stub whose promises resolve only when the test says so. */
function fetchStub() {
  const calls: PendingCall[] = [];
  const fn = ((url: RequestInfo | URL, init?: RequestInit) =>
    new Promise<Response>((resolve, reject) => {
      calls.push({
        url: String(url),
        body: JSON.parse(String(init?.body)) as CompletionRequest,
        signal: init?.signal as AbortSignal,
        resolve,
        reject,
      });
    })) as typeof fetch;
  return { calls, fn };
}

function ok(payload: CompletionResponse): Response {
  return { ok: true, status: 200, json: async () => payload } as unknown as Response;
}

function candidates(...words: string[]): CompletionResponse {
  return {
    candidates: words.map((word, i) => ({ word, score: 1 / (i + 2) })),
    latency_ms: 0.5,
  };
}

const REQ: CompletionRequest = {
  source: "s",
  left_context: "",
  right_context: "",
  typed: "a",
  top_k: 5,
};

async function microtasks(): Promise<void> {
  for (let i = 0; i < 6; i++) await Promise.resolve();
}

describe("CompletionClient", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  function make(stub = fetchStub()) {
    const seen: CompletionResponse[] = [];
    const errors: string[] = [];
    const client = new CompletionClient(
      { baseUrl: "http://api.test/", fetchFn: stub.fn },
      {
        onSuggestions: (r) => seen.push(r),
        onError: (m) => errors.push(m),
      }
    );
    return { client, stub, seen, errors };
  }

  it("collapses rapid schedules into one request after the debounce window", () => {
    const { client, stub } = make();
    client.schedule({ ...REQ, typed: "s" });
    vi.advanceTimersByTime(100);
    expect(stub.calls).toHaveLength(0);
    client.schedule({ ...REQ, typed: "sp" });
    vi.advanceTimersByTime(149);
    expect(stub.calls).toHaveLength(0);
    vi.advanceTimersByTime(1);
    expect(stub.calls).toHaveLength(1);
    expect(stub.calls[0].body.typed).toBe("sp");
    expect(stub.calls[0].url).toBe("http://api.test/api/complete");
  });

  it("typing via the state machine issues exactly one debounced request", () => {
    const { client, stub } = make();
    let state = initialState("src sentence");
    for (const key of ["s", "p"]) {
      const step = onKeystroke(state, key);
      state = step.state;
      if (step.effect === "request") client.schedule(requestFor(state));
    }
    vi.advanceTimersByTime(150);
    expect(stub.calls).toHaveLength(1);
    expect(stub.calls[0].body.typed).toBe("sp");
  });

  it("a stale response never overwrites a newer one", async () => {
    const { client, stub, seen } = make();
    client.schedule({ ...REQ, typed: "s" });
    vi.advanceTimersByTime(150);
    client.schedule({ ...REQ, typed: "sp" });
    vi.advanceTimersByTime(150);
    expect(stub.calls).toHaveLength(2);
    // the newer request answers first...
    stub.calls[1].resolve(ok(candidates("spend", "specialists")));
    await microtasks();
    expect(seen).toHaveLength(1);
    // ...then the older one finally lands (this stub ignores the abort)
    stub.calls[0].resolve(ok(candidates("stale")));
    await microtasks();
    expect(seen).toHaveLength(1);
    expect(seen[0].candidates[0].word).toBe("spend");
  });

  it("aborts the superseded request", () => {
    const { client, stub } = make();
    client.schedule({ ...REQ, typed: "s" });
    vi.advanceTimersByTime(150);
    expect(stub.calls[0].signal.aborted).toBe(false);
    client.schedule({ ...REQ, typed: "sp" });
    vi.advanceTimersByTime(150);
    expect(stub.calls[0].signal.aborted).toBe(true);
    expect(stub.calls[1].signal.aborted).toBe(false);
  });

  it("cancel() drops scheduled work before any fetch happens", () => {
    const { client, stub } = make();
    client.schedule(REQ);
    vi.advanceTimersByTime(100);
    client.cancel();
    vi.advanceTimersByTime(1000);
    expect(stub.calls).toHaveLength(0);
  });

  it("a response landing after cancel() is discarded", async () => {
    const { client, stub, seen } = make();
    client.schedule(REQ);
    vi.advanceTimersByTime(150);
    client.cancel();
    stub.calls[0].resolve(ok(candidates("late")));
    await microtasks();
    expect(seen).toHaveLength(0);
  });

  it("network failure reports an error instead of suggestions", async () => {
    const { client, stub, seen, errors } = make();
    client.schedule(REQ);
    vi.advanceTimersByTime(150);
    stub.calls[0].reject(new Error("socket closed"));
    await microtasks();
    expect(seen).toHaveLength(0);
    expect(errors).toHaveLength(1);
    expect(errors[0]).toContain("socket closed");
  });

  it("non-OK statuses surface as errors", async () => {
    const { client, stub, errors } = make();
    client.schedule(REQ);
    vi.advanceTimersByTime(150);
    stub.calls[0].resolve({ ok: false, status: 400 } as unknown as Response);
    await microtasks();
    expect(errors).toEqual(["completion failed (HTTP 400)"]);
  });
});
