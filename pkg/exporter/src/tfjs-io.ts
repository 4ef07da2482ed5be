/**
 * Filesystem IO handlers for TensorFlow.js models (model.json + weight
 * bins), since the browser-oriented tfjs package ships none for node.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import type { io } from "@tensorflow/tfjs";

export function fileSystemLoad(modelJsonPath: string): io.IOHandler {
  return {
    async load(): Promise<io.ModelArtifacts> {
      const dir = path.dirname(modelJsonPath);
      const manifest = JSON.parse(fs.readFileSync(modelJsonPath, "utf-8"));
      const weightSpecs: io.WeightsManifestEntry[] = [];
      const buffers: Buffer[] = [];
      for (const group of manifest.weightsManifest ?? []) {
        weightSpecs.push(...group.weights);
        for (const p of group.paths) {
          buffers.push(fs.readFileSync(path.join(dir, p)));
        }
      }
      const joined = Buffer.concat(buffers);
      return {
        modelTopology: manifest.modelTopology,
        format: manifest.format,
        generatedBy: manifest.generatedBy,
        convertedBy: manifest.convertedBy,
        weightSpecs,
        weightData: joined.buffer.slice(joined.byteOffset, joined.byteOffset + joined.byteLength),
      };
    },
  };
}

export function fileSystemSave(modelDir: string): io.IOHandler {
  return {
    async save(artifacts: io.ModelArtifacts): Promise<io.SaveResult> {
      fs.mkdirSync(modelDir, { recursive: true });
      const weightsName = "weights.bin";
      const manifest = {
        modelTopology: artifacts.modelTopology,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
        convertedBy: artifacts.convertedBy,
        weightsManifest: [{ paths: [weightsName], weights: artifacts.weightSpecs }],
      };
      fs.writeFileSync(path.join(modelDir, "model.json"), JSON.stringify(manifest));
      const data = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(modelDir, weightsName), Buffer.from(data));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: "JSON",
        },
      };
    },
  };
}
