/**
 * Minimal netpbm decoding: binary and ASCII PPM (P6/P3) and PGM (P5/P2).
 * Pixels come back as interleaved 8-bit RGB regardless of source format.
 */

export interface RgbImage {
  width: number;
  height: number;
  /** length = width * height * 3, row-major, 8-bit */
  pixels: Uint8Array;
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0c || byte === 0x0b;
}

/** Reads whitespace-separated tokens, skipping `#` comments, returns next offset. */
function readHeaderTokens(buf: Buffer, start: number, count: number): { tokens: string[]; offset: number } {
  const tokens: string[] = [];
  let i = start;
  while (tokens.length < count) {
    while (i < buf.length && (isSpace(buf[i]) || buf[i] === 0x23)) {
      if (buf[i] === 0x23) {
        while (i < buf.length && buf[i] !== 0x0a) i++;
      } else {
        i++;
      }
    }
    if (i >= buf.length) throw new Error("truncated netpbm header");
    let j = i;
    while (j < buf.length && !isSpace(buf[j])) j++;
    tokens.push(buf.subarray(i, j).toString("ascii"));
    i = j;
  }
  // exactly one whitespace separates the header from binary payload
  return { tokens, offset: i + 1 };
}

export function decodeNetpbm(buf: Buffer): RgbImage {
  const magic = buf.subarray(0, 2).toString("ascii");
  if (!["P2", "P3", "P5", "P6"].includes(magic)) {
    throw new Error(`unsupported image magic ${JSON.stringify(magic)} (PPM/PGM expected)`);
  }
  const gray = magic === "P2" || magic === "P5";
  const ascii = magic === "P2" || magic === "P3";
  const { tokens, offset } = readHeaderTokens(buf, 2, 3);
  const [width, height, maxval] = tokens.map(Number);
  if (!(width > 0 && height > 0)) throw new Error("bad netpbm dimensions");
  if (maxval !== 255) throw new Error(`only maxval 255 supported, got ${maxval}`);

  const channels = gray ? 1 : 3;
  const needed = width * height * channels;
  let raw: Uint8Array;
  if (ascii) {
    const text = buf.subarray(offset - 1).toString("ascii").trim().split(/\s+/);
    if (text.length < needed) throw new Error("truncated ascii pixel data");
    raw = Uint8Array.from(text.slice(0, needed), Number);
  } else {
    if (buf.length - offset < needed) throw new Error("truncated binary pixel data");
    raw = buf.subarray(offset, offset + needed);
  }

  if (!gray) return { width, height, pixels: Uint8Array.from(raw) };
  const pixels = new Uint8Array(width * height * 3);
  for (let p = 0; p < width * height; p++) {
    pixels[3 * p] = raw[p];
    pixels[3 * p + 1] = raw[p];
    pixels[3 * p + 2] = raw[p];
  }
  return { width, height, pixels };
}
