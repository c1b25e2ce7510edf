/** DOM wiring: the only module that touches the document or the network.
 *
 * Renders come from the pure functions in render.ts; all interaction state
 * lives in a ViewState and is re-rendered wholesale on every transition.
 */

import {
  downloadRecord,
  getVocabulary,
  pollJob,
  submitEvaluation,
  type PollHandle,
} from "./api.js";
import { renderDag, renderFailure, renderIndicators, renderMetrics } from "./render.js";
import {
  initialView,
  reconcileView,
  selectIndicator,
  toggleLayer,
  type ViewState,
} from "./state.js";
import type { EpisodeRecord, Job } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let view: ViewState = initialView();
let record: EpisodeRecord | null = null;
let activeJob: Job | null = null;
let activePoll: PollHandle | null = null;

function parseIdList(raw: string): string[] {
  return raw
    .split(";")
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

function rerender(): void {
  const dagPane = $("dag-pane");
  const indicatorPane = $("indicator-pane");
  const metricsPane = $("metrics-pane");
  if (!record || record.status !== "ok") {
    const message = record ? `${record.status}: ${record.message}` : "";
    dagPane.innerHTML = message ? renderFailure(message) : "";
    indicatorPane.innerHTML = "";
    metricsPane.innerHTML = "";
    return;
  }
  dagPane.innerHTML = renderDag(record, view);
  indicatorPane.innerHTML = renderIndicators(record, view);
  metricsPane.innerHTML = renderMetrics(record);
  $("download").toggleAttribute("disabled", false);
}

function setStatus(text: string): void {
  $("status").textContent = text;
}

function loadRecord(loaded: EpisodeRecord): void {
  record = loaded;
  if (loaded.dag) view = reconcileView(view, loaded.dag);
  rerender();
}

async function onSubmit(event: Event): Promise<void> {
  event.preventDefault();
  const description = ($("description") as unknown as HTMLTextAreaElement).value;
  const errorBox = $("form-error");
  errorBox.textContent = "";
  if (!description.trim()) {
    errorBox.textContent = "description is required";
    return; // client-side gate: no request sent
  }
  activePoll?.cancel();
  view = initialView();
  record = null;
  rerender();
  setStatus("submitting…");
  try {
    const job = await submitEvaluation({
      episode_id: ($("episode-id") as unknown as HTMLInputElement).value || undefined,
      description,
      government_focus: parseIdList(
        ($("government-focus") as unknown as HTMLInputElement).value,
      ),
      relevance_set: parseIdList(
        ($("relevance-set") as unknown as HTMLInputElement).value,
      ),
      profile: ($("profile") as unknown as HTMLSelectElement).value || undefined,
    });
    activeJob = job;
    setStatus(`job ${job.job_id}: ${job.state}`);
    activePoll = pollJob(job.job_id);
    const finished = await activePoll.promise;
    activeJob = finished;
    setStatus(`job ${finished.job_id}: ${finished.state}`);
    if (finished.state === "failed") {
      $("dag-pane").innerHTML = renderFailure(finished.error ?? "job failed");
      return;
    }
    if (finished.result) loadRecord(finished.result);
  } catch (err) {
    errorBox.textContent = err instanceof Error ? err.message : String(err);
    setStatus("");
  }
}

async function onDownload(): Promise<void> {
  if (!activeJob || !record) return;
  const blob = await downloadRecord(activeJob.job_id);
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = `${record.episode_id}.json`;
  link.click();
  URL.revokeObjectURL(url);
}

function onPaneClick(event: Event): void {
  const target = event.target as HTMLElement;
  if (!record?.dag) return;
  const toggle = target.closest<HTMLElement>(".layer-toggle");
  if (toggle) {
    view = toggleLayer(view, record.dag, Number(toggle.dataset.layer));
    rerender();
    return;
  }
  const row = target.closest<HTMLElement>(".indicator");
  if (row?.dataset.indicatorId) {
    view = selectIndicator(view, row.dataset.indicatorId);
    rerender();
  }
}

async function init(): Promise<void> {
  $("episode-form").addEventListener("submit", (e) => void onSubmit(e));
  $("download").addEventListener("click", () => void onDownload());
  $("dag-pane").addEventListener("click", onPaneClick);
  $("indicator-pane").addEventListener("click", onPaneClick);
  try {
    const vocab = await getVocabulary();
    $("vocab-hint").textContent =
      `${vocab.indicators.length} indicators (${vocab.version}); ` +
      "separate ids with semicolons";
  } catch {
    $("vocab-hint").textContent = "service unreachable";
  }
}

void init();
