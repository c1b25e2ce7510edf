/** Thin client for the /api/v1 evaluation service. */

import type { Job, Vocabulary } from "./types.js";

export interface EvaluateRequest {
  episode_id?: string;
  description: string;
  context?: Record<string, string>;
  government_focus?: string[];
  relevance_set?: string[];
  profile?: string;
}

async function expectOk(response: Response): Promise<Response> {
  if (response.ok) return response;
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body.detail) {
      detail = Array.isArray(body.detail) ? body.detail.join("; ") : String(body.detail);
    }
  } catch {
    /* non-JSON error body: keep the status line */
  }
  throw new Error(detail);
}

export async function submitEvaluation(request: EvaluateRequest): Promise<Job> {
  const response = await expectOk(
    await fetch("/api/v1/evaluate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    }),
  );
  return response.json();
}

export async function getJob(jobId: string): Promise<Job> {
  const response = await expectOk(await fetch(`/api/v1/jobs/${jobId}`));
  return response.json();
}

export async function getVocabulary(): Promise<Vocabulary> {
  const response = await expectOk(await fetch("/api/v1/indicators"));
  return response.json();
}

/** Raw record bytes, exactly as the batch runner would write them. */
export async function downloadRecord(jobId: string): Promise<Blob> {
  const response = await expectOk(await fetch(`/api/v1/jobs/${jobId}/record.json`));
  return response.blob();
}

export interface PollHandle {
  readonly promise: Promise<Job>;
  cancel(): void;
}

/** Poll a job until done/failed. One active job per session: callers cancel
 * the previous handle before starting a new one. */
export function pollJob(jobId: string, intervalMs = 1000): PollHandle {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let cancelled = false;
  const promise = new Promise<Job>((resolve, reject) => {
    const tick = async () => {
      if (cancelled) return;
      try {
        const job = await getJob(jobId);
        if (cancelled) return;
        if (job.state === "done" || job.state === "failed") {
          resolve(job);
          return;
        }
        timer = setTimeout(tick, intervalMs);
      } catch (err) {
        reject(err instanceof Error ? err : new Error(String(err)));
      }
    };
    void tick();
  });
  return {
    promise,
    cancel() {
      cancelled = true;
      if (timer !== undefined) clearTimeout(timer);
    },
  };
}
