/**
 * Image-folder scanning. Expected layout:
 *
 *   dataset/
 *     train/<class>/<image>.(ppm|pgm)
 *     test/<class>/<image>.(ppm|pgm)
 *
 * If every class directory name parses as a non-negative integer, those are
 * the class ids; otherwise ids are assigned by sorted name. Files are
 * visited in sorted order so an export is a pure function of the folder.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { TEST, TRAIN } from "./slcf.js";

export interface ImageEntry {
  classId: number;
  split: number;
  file: string;
}

const IMAGE_EXT = new Set([".ppm", ".pgm"]);

function listDirs(root: string): string[] {
  return fs
    .readdirSync(root, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
}

export function scanDataset(root: string): ImageEntry[] {
  const splits: Array<[string, number]> = [
    ["train", TRAIN],
    ["test", TEST],
  ];
  for (const [name] of splits) {
    if (!fs.existsSync(path.join(root, name))) {
      throw new Error(`dataset is missing a ${name}/ directory: ${root}`);
    }
  }
  const classNames = new Set<string>();
  for (const [name] of splits) {
    for (const dir of listDirs(path.join(root, name))) classNames.add(dir);
  }
  const sorted = [...classNames].sort();
  const allNumeric = sorted.every((n) => /^\d+$/.test(n));
  const idOf = new Map<string, number>(
    sorted.map((n, i) => [n, allNumeric ? parseInt(n, 10) : i]),
  );

  const entries: ImageEntry[] = [];
  for (const [splitName, flag] of splits) {
    for (const className of listDirs(path.join(root, splitName))) {
      const dir = path.join(root, splitName, className);
      const files = fs
        .readdirSync(dir)
        .filter((f) => IMAGE_EXT.has(path.extname(f).toLowerCase()))
        .sort();
      for (const f of files) {
        entries.push({ classId: idOf.get(className)!, split: flag, file: path.join(dir, f) });
      }
    }
  }
  if (entries.length === 0) throw new Error(`no .ppm/.pgm images found under ${root}`);
  entries.sort((a, b) => a.split - b.split || a.classId - b.classId || (a.file < b.file ? -1 : 1));
  return entries;
}
