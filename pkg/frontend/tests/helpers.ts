import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

const here = dirname(fileURLToPath(import.meta.url));

export function fixture(name: string): string {
  return readFileSync(join(here, 'fixtures', name), 'utf-8');
}

/** fetch stub serving canned bodies by (method, path-suffix). */
export function fakeFetch(
  routes: Record<string, { status?: number; body: string }>,
): typeof fetch {
  const calls: { url: string; method: string; body?: string }[] = [];
  const fn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = (init?.method ?? 'GET').toUpperCase();
    calls.push({ url, method, body: init?.body as string | undefined });
    for (const [key, value] of Object.entries(routes)) {
      const [routeMethod, suffix] = key.split(' ', 2) as [string, string];
      if (method === routeMethod && url.endsWith(suffix)) {
        return new Response(value.body, {
          status: value.status ?? (method === 'POST' && suffix === '/v1/sessions' ? 201 : 200),
          headers: { 'content-type': 'application/json' },
        });
      }
    }
    return new Response(
      JSON.stringify({ code: 'UnknownRoute', message: url, detail: null }),
      { status: 404 },
    );
  }) as typeof fetch;
  (fn as unknown as { calls: typeof calls }).calls = calls;
  return fn;
}

export function callsOf(fn: typeof fetch) {
  return (fn as unknown as { calls: { url: string; method: string; body?: string }[] })
    .calls;
}
