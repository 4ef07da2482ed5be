/**
 * The export pipeline: scan the folder, run the backbone in batches, write
 * one SLCF record per image with the class id and official split flag.
 */

import * as fs from "node:fs";

import { parseBackbone } from "./backbone.js";
import { scanDataset } from "./dataset.js";
import { decodeNetpbm } from "./image.js";
import { encodeSlcf, type FeatureRecord } from "./slcf.js";

export interface ExportJob {
  backbone: string;
  dataset: string;
  out: string;
  batchSize?: number;
}

export interface ExportSummary {
  records: number;
  featureDim: number;
  classes: number;
}

export async function exportFeatures(job: ExportJob): Promise<ExportSummary> {
  const backbone = await parseBackbone(job.backbone);
  const entries = scanDataset(job.dataset);
  const batchSize = job.batchSize ?? 64;

  const records: FeatureRecord[] = [];
  for (let start = 0; start < entries.length; start += batchSize) {
    const slice = entries.slice(start, start + batchSize);
    const images = slice.map((e) => decodeNetpbm(fs.readFileSync(e.file)));
    const features = await backbone.run(images);
    slice.forEach((entry, i) => {
      records.push({ classId: entry.classId, split: entry.split, features: features[i] });
    });
  }

  fs.writeFileSync(job.out, encodeSlcf(records, backbone.featureDim));
  return {
    records: records.length,
    featureDim: backbone.featureDim,
    classes: new Set(records.map((r) => r.classId)).size,
  };
}
