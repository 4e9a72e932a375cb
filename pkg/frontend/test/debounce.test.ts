import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { debounce } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("collapses rapid calls into one trailing invocation with the last args", () => {
    const calls: number[] = [];
    const d = debounce((x: number) => calls.push(x), 100);
    for (let i = 0; i < 50; i++) {
      d.call(i);
      vi.advanceTimersByTime(10); // faster than the delay, so no call fires
    }
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(100);
    expect(calls).toEqual([49]);
  });

  it("flush fires immediately, once", () => {
    const calls: string[] = [];
    const d = debounce((s: string) => calls.push(s), 100);
    d.call("a");
    d.call("b");
    d.flush();
    expect(calls).toEqual(["b"]);
    vi.advanceTimersByTime(500);
    expect(calls).toEqual(["b"]);
  });

  it("cancel drops the pending call", () => {
    const calls: number[] = [];
    const d = debounce((x: number) => calls.push(x), 100);
    d.call(7);
    expect(d.pending()).toBe(true);
    d.cancel();
    vi.advanceTimersByTime(500);
    expect(calls).toEqual([]);
    expect(d.pending()).toBe(false);
  });
});
