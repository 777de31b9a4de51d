/**
 * Raw-lexeme extraction from JSON text.
 *
 * The console must display exactly the bytes the service sent: JS number
 * round-tripping can change them (1e-05 becomes "0.00001"), so numeric
 * values are displayed as the original JSON lexemes, located here with a
 * tiny tokenizer rather than JSON.parse.
 */

type RawValue = string;

/** The raw lexeme at a dotted path ("severities.fatal.median"). */
export function rawAt(text: string, path: string): RawValue {
  const keys = path.split('.');
  let span: [number, number] = [0, text.length];
  for (const key of keys) {
    span = memberSpan(text, span, key);
  }
  return text.slice(span[0], span[1]).trim();
}

/** Span of the value for `key` inside the object delimited by span. */
function memberSpan(
  text: string,
  span: [number, number],
  key: string,
): [number, number] {
  let i = skipWs(text, span[0]);
  if (text[i] !== '{') throw new Error(`expected object at ${i} for key ${key}`);
  i += 1;
  while (i < span[1]) {
    i = skipWs(text, i);
    if (text[i] === '}') break;
    const [name, afterName] = readString(text, i);
    i = skipWs(text, afterName);
    if (text[i] !== ':') throw new Error(`expected ':' at ${i}`);
    i = skipWs(text, i + 1);
    const end = valueEnd(text, i);
    if (name === key) return [i, end];
    i = skipWs(text, end);
    if (text[i] === ',') i += 1;
  }
  throw new Error(`key ${key} not found`);
}

function skipWs(text: string, i: number): number {
  while (i < text.length && /\s/.test(text[i]!)) i += 1;
  return i;
}

function readString(text: string, i: number): [string, number] {
  if (text[i] !== '"') throw new Error(`expected string at ${i}`);
  let out = '';
  i += 1;
  while (i < text.length) {
    const c = text[i]!;
    if (c === '\\') {
      out += text[i + 1];
      i += 2;
      continue;
    }
    if (c === '"') return [out, i + 1];
    out += c;
    i += 1;
  }
  throw new Error('unterminated string');
}

/** Index one past the end of the JSON value starting at i. */
function valueEnd(text: string, i: number): number {
  const c = text[i];
  if (c === '"') return readString(text, i)[1];
  if (c === '{' || c === '[') {
    const open = c;
    const close = open === '{' ? '}' : ']';
    let depth = 0;
    let j = i;
    while (j < text.length) {
      const ch = text[j]!;
      if (ch === '"') {
        j = readString(text, j)[1];
        continue;
      }
      if (ch === open) depth += 1;
      if (ch === close) {
        depth -= 1;
        if (depth === 0) return j + 1;
      }
      j += 1;
    }
    throw new Error('unterminated container');
  }
  // number / true / false / null
  let j = i;
  while (j < text.length && !/[\s,}\]]/.test(text[j]!)) j += 1;
  return j;
}
