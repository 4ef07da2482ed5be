#!/usr/bin/env node
/**
 * slcf-export export --backbone <pool:N | tfjs:model.json> --dataset <dir>
 *                    --out <file.slcf> [--batch N]
 */

import { exportFeatures } from "./export.js";

function parseArgs(argv: string[]): Record<string, string> {
  const args: Record<string, string> = {};
  for (let i = 0; i < argv.length; i++) {
    if (!argv[i].startsWith("--")) throw new Error(`unexpected argument ${argv[i]}`);
    const key = argv[i].slice(2);
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`flag --${key} needs a value`);
    args[key] = value;
    i++;
  }
  return args;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command !== "export") {
    console.error("usage: slcf-export export --backbone <id> --dataset <dir> --out <file> [--batch N]");
    return 1;
  }
  let args: Record<string, string>;
  try {
    args = parseArgs(rest);
    for (const required of ["backbone", "dataset", "out"]) {
      if (!(required in args)) throw new Error(`missing --${required}`);
    }
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const summary = await exportFeatures({
      backbone: args.backbone,
      dataset: args.dataset,
      out: args.out,
      batchSize: args.batch ? parseInt(args.batch, 10) : undefined,
    });
    console.log(
      `wrote ${summary.records} records (${summary.classes} classes, dim ${summary.featureDim}) to ${args.out}`,
    );
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

main().then((code) => {
  process.exitCode = code;
});
