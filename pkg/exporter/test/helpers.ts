import * as fs from "node:fs";
import * as path from "node:path";

/** Binary PPM with pixels from a deterministic (x, y) -> [r, g, b] function. */
export function writePpm(
  file: string,
  width: number,
  height: number,
  pixel: (x: number, y: number) => [number, number, number],
): void {
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii");
  const body = Buffer.alloc(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b] = pixel(x, y);
      const p = (y * width + x) * 3;
      body[p] = r;
      body[p + 1] = g;
      body[p + 2] = b;
    }
  }
  fs.mkdirSync(path.dirname(file), { recursive: true });
  fs.writeFileSync(file, Buffer.concat([header, body]));
}

/** The standard toy folder: 2 classes x (1 train + 1 test) 8x8 images. */
export function writeToyDataset(root: string): void {
  writePpm(path.join(root, "train", "0", "a.ppm"), 8, 8, (x, y) => [x * 16, y * 16, 32]);
  writePpm(path.join(root, "test", "0", "b.ppm"), 8, 8, (x, y) => [255 - x * 16, y * 8, 64]);
  writePpm(path.join(root, "train", "1", "a.ppm"), 8, 8, (x, y) => [16, (x + y) * 8, 200]);
  writePpm(path.join(root, "test", "1", "b.ppm"), 8, 8, (x, y) => [128, 64, (x * y) % 256]);
}
