/** Shared test scaffolding: a queued fetch stub and fixture loading. */

import { vi } from "vitest";

import rawRoundtrips from "./fixtures/roundtrips.json";

export interface Exchange {
  name: string;
  request: {
    method: string;
    path: string;
    query: Record<string, string> | null;
    body: unknown;
  };
  response: {
    status: number;
    body: unknown;
  };
}

export const roundtrips = rawRoundtrips as unknown as Exchange[];

export function exchange(name: string): Exchange {
  const found = roundtrips.find((r) => r.name === name);
  if (found === undefined) throw new Error(`no recorded exchange named ${name}`);
  return found;
}

export interface RecordedCall {
  path: string;
  method: string;
  body: unknown;
}

export interface FetchStub {
  calls: RecordedCall[];
  /** Queue one more canned response. */
  push(status: number, body: unknown): void;
}

/**
 * Replace global fetch with a queue of canned responses. Each call pops
 * the next response; running dry fails the test loudly.
 */
export function stubFetch(...canned: { status: number; body: unknown }[]): FetchStub {
  const queue = [...canned];
  const calls: RecordedCall[] = [];
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const next = queue.shift();
    if (next === undefined) {
      throw new Error(`unexpected fetch of ${String(input)}: response queue is empty`);
    }
    calls.push({
      path: String(input),
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    return {
      ok: next.status >= 200 && next.status < 300,
      status: next.status,
      json: async () => next.body,
    } as Response;
  });
  vi.stubGlobal("fetch", mock);
  return {
    calls,
    push: (status, body) => queue.push({ status, body }),
  };
}
