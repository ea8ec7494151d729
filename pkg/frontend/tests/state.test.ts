import { describe, expect, it } from "vitest";

import {
  applyResponse,
  contextType,
  initialState,
  onKeystroke,
  requestFor,
  withNotice,
} from "../src/state.js";
import type { EditorState, Suggestion } from "../src/types.js";

const SOURCE = "我 对 你 的 帮助 表示 感谢 。";

function sugg(...words: string[]): Suggestion[] {
  return words.map((word, i) => ({ word, score: 0.5 / (i + 1) }));
}

function typed(state: EditorState, keys: string): EditorState {
  let current = state;
  for (const key of keys) current = onKeystroke(current, key).state;
  return current;
}

describe("typing", () => {
  it("appends characters to the pending buffer and asks for a request", () => {
    const s0 = initialState(SOURCE);
    const step1 = onKeystroke(s0, "s");
    expect(step1.state.pending).toBe("s");
    expect(step1.effect).toBe("request");
    const step2 = onKeystroke(step1.state, "p");
    expect(step2.state.pending).toBe("sp");
    expect(step2.effect).toBe("request");
  });

  it("never lets whitespace into the pending buffer", () => {
    const s = typed(initialState(SOURCE), "sp");
    for (const ws of [" ", "\t", "\n"]) {
      const step = onKeystroke(s, ws);
      expect(step.state).toBe(s);
      expect(step.effect).toBe("none");
      expect(step.state.pending).not.toMatch(/\s/);
    }
    // the typed buffer reaches committed context through acceptance only
    expect(s.left).toEqual([]);
  });

  it("ignores non-character keys", () => {
    const s0 = typed(initialState(SOURCE), "sp");
    const step = onKeystroke(s0, "Shift");
    expect(step.state).toBe(s0);
    expect(step.effect).toBe("none");
  });
});

describe("accepting a suggestion", () => {
  it("moves the word into the left context and clears the typed buffer", () => {
    let s = typed(initialState(SOURCE, ["I"]), "sp");
    s = applyResponse(s, { candidates: sugg("specialists", "spend"), latency_ms: 1 });
    const step = onKeystroke(s, "Tab");
    expect(step.state.left).toEqual(["I", "specialists"]);
    expect(step.state.pending).toBe("");
    expect(step.state.suggestions).toEqual([]);
    expect(step.effect).toBe("cancel");
  });

  it("honors the arrow selection, Enter behaving like Tab", () => {
    let s = typed(initialState(SOURCE), "sp");
    s = applyResponse(s, { candidates: sugg("specialists", "spend", "spark"), latency_ms: 1 });
    s = onKeystroke(s, "ArrowDown").state;
    s = onKeystroke(s, "ArrowDown").state;
    expect(s.selection).toBe(2);
    const step = onKeystroke(s, "Enter");
    expect(step.state.left).toEqual(["spark"]);
  });

  it("selection stays clamped to the candidate list", () => {
    let s = applyResponse(typed(initialState(SOURCE), "s"), {
      candidates: sugg("a", "b"),
      latency_ms: 1,
    });
    s = onKeystroke(s, "ArrowUp").state;
    expect(s.selection).toBe(0);
    for (let i = 0; i < 5; i++) s = onKeystroke(s, "ArrowDown").state;
    expect(s.selection).toBe(1);
  });

  it("does nothing without suggestions", () => {
    const s = typed(initialState(SOURCE), "sp");
    const step = onKeystroke(s, "Tab");
    expect(step.state).toBe(s);
    expect(step.effect).toBe("none");
  });
});

describe("escape and backspace", () => {
  it("Escape clears the dropdown and cancels outstanding work", () => {
    const s = applyResponse(typed(initialState(SOURCE), "s"), {
      candidates: sugg("a"),
      latency_ms: 1,
    });
    const step = onKeystroke(s, "Escape");
    expect(step.state.suggestions).toEqual([]);
    expect(step.state.pending).toBe("s");
    expect(step.effect).toBe("cancel");
  });

  it("Backspace trims and re-requests, cancelling when empty", () => {
    const s = typed(initialState(SOURCE), "sp");
    const step1 = onKeystroke(s, "Backspace");
    expect(step1.state.pending).toBe("s");
    expect(step1.effect).toBe("request");
    const step2 = onKeystroke(step1.state, "Backspace");
    expect(step2.state.pending).toBe("");
    expect(step2.effect).toBe("cancel");
  });

  it("Backspace at an empty buffer pulls back the last committed word", () => {
    const s = initialState(SOURCE, ["the", "station"]);
    const step = onKeystroke(s, "Backspace");
    expect(step.state.left).toEqual(["the"]);
    expect(step.state.pending).toBe("station");
    expect(step.effect).toBe("request");
  });
});

describe("cursor repositioning", () => {
  it("walks the cursor across committed tokens and hits all context types", () => {
    let s = initialState(SOURCE, ["we", "thank", "you"]);
    expect(contextType(s)).toBe("prefix");
    s = onKeystroke(s, "ArrowLeft").state;
    expect(s.left).toEqual(["we", "thank"]);
    expect(s.right).toEqual(["you"]);
    expect(contextType(s)).toBe("bi");
    s = onKeystroke(s, "ArrowLeft").state;
    s = onKeystroke(s, "ArrowLeft").state;
    expect(s.left).toEqual([]);
    expect(contextType(s)).toBe("suffix");
    const stuck = onKeystroke(s, "ArrowLeft");
    expect(stuck.state).toBe(s);
    s = onKeystroke(s, "ArrowRight").state;
    expect(s.left).toEqual(["we"]);
    expect(contextType(initialState(SOURCE))).toBe("zero");
  });

  it("repositioning is blocked while characters are pending", () => {
    const s = typed(initialState(SOURCE, ["we"]), "th");
    const step = onKeystroke(s, "ArrowLeft");
    expect(step.state).toBe(s);
    expect(step.effect).toBe("none");
  });

  it("moving the cursor drops now-misplaced suggestions", () => {
    let s = applyResponse(initialState(SOURCE, ["we", "you"]), {
      candidates: sugg("thank"),
      latency_ms: 1,
    });
    s = onKeystroke(s, "ArrowLeft").state;
    expect(s.suggestions).toEqual([]);
  });
});

describe("requests and notices", () => {
  it("builds the wire request with space-joined contexts", () => {
    let s = initialState(SOURCE, ["we", "thank"]);
    s = onKeystroke(s, "ArrowLeft").state;
    s = typed(s, "yo");
    expect(requestFor(s)).toEqual({
      source: SOURCE,
      left_context: "we",
      right_context: "thank",
      typed: "yo",
      top_k: 5,
    });
  });

  it("a response resets the selection and clears any notice", () => {
    let s = withNotice(typed(initialState(SOURCE), "s"), "completion request failed: down");
    s = { ...s, selection: 3 };
    s = applyResponse(s, { candidates: sugg("a", "b"), latency_ms: 2 });
    expect(s.selection).toBe(0);
    expect(s.notice).toBeNull();
    expect(s.suggestions.map((c) => c.word)).toEqual(["a", "b"]);
  });
});
