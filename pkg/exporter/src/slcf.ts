/**
 * SLCF writer: the engine's feature-dataset layout.
 *
 * Little-endian throughout: magic "SLCF", version u32 = 1, feature_dim u32,
 * record_count u64, then per record (class_id u32, split_flag u8, dim x f32).
 * Features are rounded to f32 exactly once, at write time.
 */

export const TRAIN = 0;
export const TEST = 1;

export interface FeatureRecord {
  classId: number;
  split: number; // 0 = train, 1 = test
  features: Float64Array | number[];
}

export function encodeSlcf(records: FeatureRecord[], featureDim: number): Buffer {
  const headerSize = 4 + 4 + 4 + 8;
  const recordSize = 4 + 1 + 4 * featureDim;
  const out = Buffer.alloc(headerSize + recordSize * records.length);
  out.write("SLCF", 0, "ascii");
  out.writeUInt32LE(1, 4);
  out.writeUInt32LE(featureDim, 8);
  out.writeBigUInt64LE(BigInt(records.length), 12);
  let offset = headerSize;
  for (const record of records) {
    if (record.features.length !== featureDim) {
      throw new Error(`record has ${record.features.length} features, expected ${featureDim}`);
    }
    out.writeUInt32LE(record.classId >>> 0, offset);
    out.writeUInt8(record.split, offset + 4);
    let pos = offset + 5;
    for (let i = 0; i < featureDim; i++) {
      out.writeFloatLE(Math.fround(Number(record.features[i])), pos);
      pos += 4;
    }
    offset += recordSize;
  }
  return out;
}
