import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { EpisodeRecord } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const goldenDir = join(here, "..", "..", "tests", "golden");

export function goldenBytes(name: string): Buffer {
  return readFileSync(join(goldenDir, name));
}

export function goldenRecord(name = "record_ep1_seed42.json"): EpisodeRecord {
  return JSON.parse(goldenBytes(name).toString("utf-8")) as EpisodeRecord;
}

export function baselineRecord(): EpisodeRecord {
  return goldenRecord("record_ep1_baseline_seed42.json");
}
