/**
 * Inference-only wrapper around a TensorFlow.js LayersModel checkpoint.
 *
 * The model must take rank-4 input [batch, h, w, c] with c of 1 or 3 and
 * produce rank-2 features [batch, d]. Images are nearest-neighbor resized
 * to (h, w) and scaled to [0, 1]; no augmentation, so exports are
 * deterministic.
 */

import * as tf from "@tensorflow/tfjs";

import type { Backbone } from "./backbone.js";
import type { RgbImage } from "./image.js";
import { fileSystemLoad } from "./tfjs-io.js";

function resizeToInput(image: RgbImage, h: number, w: number, c: number): Float32Array {
  const out = new Float32Array(h * w * c);
  for (let y = 0; y < h; y++) {
    const sy = Math.min(image.height - 1, Math.floor((y * image.height) / h));
    for (let x = 0; x < w; x++) {
      const sx = Math.min(image.width - 1, Math.floor((x * image.width) / w));
      const p = (sy * image.width + sx) * 3;
      const base = (y * w + x) * c;
      if (c === 3) {
        out[base] = image.pixels[p] / 255;
        out[base + 1] = image.pixels[p + 1] / 255;
        out[base + 2] = image.pixels[p + 2] / 255;
      } else {
        out[base] = (image.pixels[p] + image.pixels[p + 1] + image.pixels[p + 2]) / (3 * 255);
      }
    }
  }
  return out;
}

export class TfjsBackbone implements Backbone {
  readonly featureDim: number;
  private readonly model: tf.LayersModel;
  private readonly h: number;
  private readonly w: number;
  private readonly c: number;

  private constructor(model: tf.LayersModel, h: number, w: number, c: number, featureDim: number) {
    this.model = model;
    this.h = h;
    this.w = w;
    this.c = c;
    this.featureDim = featureDim;
  }

  static async load(modelJsonPath: string): Promise<TfjsBackbone> {
    const model = await tf.loadLayersModel(fileSystemLoad(modelJsonPath));
    const inputShape = model.inputs[0].shape;
    if (inputShape.length !== 4) {
      throw new Error(`backbone input must be rank 4 [batch, h, w, c], got ${JSON.stringify(inputShape)}`);
    }
    const [, h, w, c] = inputShape as number[];
    if (c !== 1 && c !== 3) throw new Error(`backbone channels must be 1 or 3, got ${c}`);
    const outShape = model.outputs[0].shape;
    if (outShape.length !== 2 || !outShape[1]) {
      throw new Error(`backbone output must be rank 2 [batch, d], got ${JSON.stringify(outShape)}`);
    }
    return new TfjsBackbone(model, h, w, c, outShape[1] as number);
  }

  async run(images: RgbImage[]): Promise<Float64Array[]> {
    const batch = new Float32Array(images.length * this.h * this.w * this.c);
    images.forEach((img, i) => {
      batch.set(resizeToInput(img, this.h, this.w, this.c), i * this.h * this.w * this.c);
    });
    const input = tf.tensor4d(batch, [images.length, this.h, this.w, this.c]);
    const output = this.model.predict(input) as tf.Tensor;
    const values = await output.data();
    input.dispose();
    output.dispose();
    return images.map((_, i) =>
      Float64Array.from(values.subarray(i * this.featureDim, (i + 1) * this.featureDim)),
    );
  }
}
