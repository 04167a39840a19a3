/**
 * Procedure state machine for the interactive exploration loop:
 * pick a precision from the trade-off curve, place the region of
 * interest, run an approximation, inspect, refine, repeat. History is
 * append-only and can be replayed through the service to demonstrate
 * determinism to the user.
 */

import { ApiClient, CurvePayload, RefineResult, RunSummary } from "./api.js";
import { CurveSelection, nearestSample, selectionValid } from "./curve.js";

export interface SelectTradeoffResult {
  ok: boolean;
  reason?: string;
  selection?: CurveSelection;
}

export interface ReplayReport {
  identical: boolean;
  runs: number;
  mismatchedRuns: number[];
}

export class ProcedureState {
  sessionId = "";
  delta = 0.5;
  roiCenter: [number, number] = [0, 0];
  roiRadius = 1.0;
  curve: CurvePayload | null = null;
  selection: CurveSelection | null = null;
  history: RunSummary[] = [];
  current: RunSummary | null = null;
  lastRefine: RefineResult | null = null;

  constructor(
    private api: ApiClient,
    private problem: object = { builtin: "parabola2d" },
  ) {}

  async init(): Promise<void> {
    this.sessionId = await this.api.createSession(this.problem);
  }

  async loadCurve(delta: number, count = 400): Promise<CurvePayload> {
    this.curve = await this.api.curve(delta, count);
    this.delta = delta;
    this.selection = null;
    return this.curve;
  }

  /** Snap a curve click to the nearest sample; reject beyond validity. */
  selectTradeoff(rClick: number): SelectTradeoffResult {
    if (!this.curve) {
      return { ok: false, reason: "no curve loaded" };
    }
    if (!selectionValid(rClick, this.curve.r_validity)) {
      return { ok: false, reason: "OutOfValidity" };
    }
    const selection = nearestSample(this.curve.samples, rClick);
    this.selection = selection;
    this.roiRadius = selection.r;
    return { ok: true, selection };
  }

  setRoiCenter(x: number, y: number): void {
    this.roiCenter = [x, y];
  }

  /** Exact radius entry (typed), superseding the snapped sample. */
  setRoiRadius(r: number): void {
    if (r > 0) {
      this.roiRadius = r;
    }
  }

  async run(seed = 0): Promise<RunSummary> {
    const summary = await this.api.approximate(this.sessionId, {
      delta: this.delta,
      center: this.roiCenter,
      radius: this.roiRadius,
      seed,
    });
    this.current = summary;
    this.history.push(summary);
    return summary;
  }

  /** Non-blocking run with status polling for long computations. */
  async runPolled(
    onProgress: (active: boolean) => void,
    seed = 0,
    pollMs = 250,
  ): Promise<RunSummary> {
    const started = await this.api.approximate(
      this.sessionId,
      {
        delta: this.delta,
        center: this.roiCenter,
        radius: this.roiRadius,
        seed,
      },
      false,
    );
    const index = started.index;
    for (;;) {
      const status = await this.api.status(this.sessionId);
      onProgress(status.active);
      if (!status.active) {
        break;
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
    const summary = await this.api.result(this.sessionId, index);
    this.current = summary;
    this.history.push(summary);
    return summary;
  }

  async refine(point: [number, number], direction?: [number, number]) {
    this.lastRefine = await this.api.refine(this.sessionId, point, direction);
    return this.lastRefine;
  }

  /**
   * Re-run the whole history on a fresh session and compare polygons.
   * Identical output is the determinism guarantee surfaced to the user.
   */
  async replayHistory(): Promise<ReplayReport> {
    const fresh = await this.api.createSession(this.problem);
    const mismatched: number[] = [];
    for (const entry of this.history) {
      const redone = await this.api.approximate(fresh, {
        delta: entry.delta,
        center: entry.center,
        radius: entry.radius,
        seed: entry.seed,
      });
      if (JSON.stringify(redone.vertices) !== JSON.stringify(entry.vertices)) {
        mismatched.push(entry.index);
      }
    }
    return {
      identical: mismatched.length === 0,
      runs: this.history.length,
      mismatchedRuns: mismatched,
    };
  }
}
