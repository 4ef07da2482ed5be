/**
 * Backbones turn decoded images into feature vectors.
 *
 * pool:<g>   deterministic g x g average pooling of pixel intensity, no
 *            weights: cell (i, j) covers rows [floor(i*h/g), floor((i+1)*h/g))
 *            and the matching columns; the feature is the integer sum of
 *            r+g+b over the cell divided by (3 * 255 * pixel count). Integer
 *            sums plus a single f64 division keep the result bit-reproducible
 *            across implementations.
 *
 * tfjs:<model.json>   a TensorFlow.js LayersModel loaded from disk; images
 *            are nearest-neighbor resized to the model's input and scaled to
 *            [0, 1]; features are the model's rank-2 output.
 */

import type { RgbImage } from "./image.js";

export interface Backbone {
  readonly featureDim: number;
  /** Feature vectors for a batch of images, one Float64Array per image. */
  run(images: RgbImage[]): Promise<Float64Array[]>;
}

export class PoolBackbone implements Backbone {
  readonly grid: number;
  readonly featureDim: number;

  constructor(grid: number) {
    if (!Number.isInteger(grid) || grid < 1) throw new Error(`bad pool grid ${grid}`);
    this.grid = grid;
    this.featureDim = grid * grid;
  }

  private poolOne(image: RgbImage): Float64Array {
    const { width, height, pixels } = image;
    const g = this.grid;
    if (height < g || width < g) {
      throw new Error(`image ${width}x${height} smaller than ${g}x${g} pooling grid`);
    }
    const out = new Float64Array(g * g);
    for (let i = 0; i < g; i++) {
      const r0 = Math.floor((i * height) / g);
      const r1 = Math.floor(((i + 1) * height) / g);
      for (let j = 0; j < g; j++) {
        const c0 = Math.floor((j * width) / g);
        const c1 = Math.floor(((j + 1) * width) / g);
        let sum = 0; // exact: bounded by 3*255*pixels << 2^53
        for (let r = r0; r < r1; r++) {
          let p = (r * width + c0) * 3;
          for (let c = c0; c < c1; c++) {
            sum += pixels[p] + pixels[p + 1] + pixels[p + 2];
            p += 3;
          }
        }
        out[i * g + j] = sum / (3 * 255 * (r1 - r0) * (c1 - c0));
      }
    }
    return out;
  }

  async run(images: RgbImage[]): Promise<Float64Array[]> {
    return images.map((img) => this.poolOne(img));
  }
}

export async function parseBackbone(spec: string): Promise<Backbone> {
  if (spec.startsWith("pool:")) {
    return new PoolBackbone(parseInt(spec.slice("pool:".length), 10));
  }
  if (spec.startsWith("tfjs:")) {
    const { TfjsBackbone } = await import("./tfjs-backbone.js");
    return TfjsBackbone.load(spec.slice("tfjs:".length));
  }
  throw new Error(`unknown backbone ${JSON.stringify(spec)}; expected pool:<grid> or tfjs:<model.json>`);
}
