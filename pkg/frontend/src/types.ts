/** Wire types for the /api/v1 evaluation service (read-only mirrors). */

export type Direction = "increase" | "decrease" | "ambiguous";
export type RecordStatus = "ok" | "skipped" | "error";
export type JobState = "queued" | "running" | "done" | "failed";

export interface DagNode {
  node_id: string;
  text: string;
  layer: number;
  parents: string[];
}

export interface Dag {
  root_id: string;
  max_depth_used: number;
  max_branch_used: number;
  nodes: DagNode[];
}

export interface Impact {
  indicator_id: string;
  affected: boolean;
  direction?: Direction;
  supporting_nodes?: string[];
}

export interface Metrics {
  coverage: number | null;
  discovery: number | null;
  focus_ratio: number | null;
}

export interface EpisodeRecord {
  episode_id: string;
  description: string;
  context: Record<string, string>;
  government_focus: string[];
  relevance_set: string[];
  status: RecordStatus;
  message: string;
  dag?: Dag;
  impacts?: Impact[];
  metrics?: Metrics;
  diagnostics: string[];
}

export interface Job {
  job_id: string;
  state: JobState;
  result?: EpisodeRecord;
  error?: string;
}

export interface Indicator {
  id: string;
  name: string;
  definition: string;
}

export interface Vocabulary {
  version: string;
  indicators: Indicator[];
}
