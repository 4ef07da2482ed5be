import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { exportFeatures } from "../src/export.js";
import { TfjsBackbone } from "../src/tfjs-backbone.js";
import { fileSystemSave } from "../src/tfjs-io.js";
import { writeToyDataset } from "./helpers.js";

let workdir: string;
let modelJson: string;

beforeAll(async () => {
  workdir = fs.mkdtempSync(path.join(os.tmpdir(), "slcf-tfjs-"));
  // a tiny fixed-weight backbone: 6x6 grayscale input -> 5 features
  const model = tf.sequential();
  model.add(tf.layers.flatten({ inputShape: [6, 6, 1] }));
  model.add(tf.layers.dense({ units: 5, activation: "relu" }));
  const dense = model.layers[1];
  const fixedW = tf.tensor2d(
    Array.from({ length: 36 * 5 }, (_, i) => Math.sin(i + 1) * 0.3),
    [36, 5],
  );
  const fixedB = tf.tensor1d([0.1, -0.1, 0.0, 0.2, -0.2]);
  dense.setWeights([fixedW, fixedB]);
  const modelDir = path.join(workdir, "backbone");
  await model.save(fileSystemSave(modelDir));
  modelJson = path.join(modelDir, "model.json");
});

afterAll(() => {
  fs.rmSync(workdir, { recursive: true, force: true });
});

describe("TfjsBackbone", () => {
  it("round-trips through the filesystem io handlers", async () => {
    const backbone = await TfjsBackbone.load(modelJson);
    expect(backbone.featureDim).toBe(5);
  });

  it("exports a toy dataset deterministically", async () => {
    const dataset = path.join(workdir, "toy");
    writeToyDataset(dataset);
    const a = path.join(workdir, "a.slcf");
    const b = path.join(workdir, "b.slcf");
    const summary = await exportFeatures({ backbone: `tfjs:${modelJson}`, dataset, out: a });
    expect(summary).toEqual({ records: 4, featureDim: 5, classes: 2 });
    await exportFeatures({ backbone: `tfjs:${modelJson}`, dataset, out: b, batchSize: 2 });
    expect(fs.readFileSync(a).equals(fs.readFileSync(b))).toBe(true);
  });

  it("rejects models with non-image inputs", async () => {
    const flat = tf.sequential();
    flat.add(tf.layers.dense({ units: 3, inputShape: [10] }));
    const dir = path.join(workdir, "flat-model");
    await flat.save(fileSystemSave(dir));
    await expect(TfjsBackbone.load(path.join(dir, "model.json"))).rejects.toThrow(/rank 4/);
  });
});
