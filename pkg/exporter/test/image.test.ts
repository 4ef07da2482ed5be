import { describe, expect, it } from "vitest";

import { decodeNetpbm } from "../src/image.js";

function ppm6(width: number, height: number, body: number[]): Buffer {
  return Buffer.concat([
    Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii"),
    Buffer.from(body),
  ]);
}

describe("decodeNetpbm", () => {
  it("decodes binary ppm", () => {
    const img = decodeNetpbm(ppm6(2, 1, [10, 20, 30, 40, 50, 60]));
    expect(img.width).toBe(2);
    expect(img.height).toBe(1);
    expect([...img.pixels]).toEqual([10, 20, 30, 40, 50, 60]);
  });

  it("decodes ascii ppm", () => {
    const buf = Buffer.from("P3\n2 1\n255\n10 20 30 40 50 60\n", "ascii");
    expect([...decodeNetpbm(buf).pixels]).toEqual([10, 20, 30, 40, 50, 60]);
  });

  it("replicates grayscale into rgb", () => {
    const binary = Buffer.concat([Buffer.from("P5\n1 2\n255\n", "ascii"), Buffer.from([7, 9])]);
    expect([...decodeNetpbm(binary).pixels]).toEqual([7, 7, 7, 9, 9, 9]);
    const ascii = Buffer.from("P2\n1 2\n255\n7 9\n", "ascii");
    expect([...decodeNetpbm(ascii).pixels]).toEqual([7, 7, 7, 9, 9, 9]);
  });

  it("skips header comments", () => {
    const buf = Buffer.concat([
      Buffer.from("P6\n# a comment\n1 1\n# another\n255\n", "ascii"),
      Buffer.from([1, 2, 3]),
    ]);
    expect([...decodeNetpbm(buf).pixels]).toEqual([1, 2, 3]);
  });

  it("rejects other formats and truncation", () => {
    expect(() => decodeNetpbm(Buffer.from("P1\n1 1\n1\n0", "ascii"))).toThrow(/unsupported/);
    expect(() => decodeNetpbm(ppm6(2, 2, [1, 2, 3]))).toThrow(/truncated/);
    const bmp = Buffer.from("BM000000", "ascii");
    expect(() => decodeNetpbm(bmp)).toThrow(/unsupported/);
  });
});
