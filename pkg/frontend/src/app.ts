/**
 * DOM-free application controller: owns the session state, the last
 * payload and all server interactions. The page binds events to these
 * actions and re-renders from the snapshot; tests drive the same actions
 * against a stubbed transport.
 */

import { ApiClient, ApiError, LatestWins } from './api.js';
import {
  SessionState,
  beginCompute,
  clearNotice,
  computeFailed,
  computeSucceeded,
  initialState,
  requestFailed,
  selectAlgorithm,
  selectDataset,
  setEpsilon,
  setTransform,
} from './state.js';
import type { AnalysisPayload, DatasetInfo, TransformOptions } from './types.js';
import { bundleFilename } from './views.js';

export type BundleSaver = (blob: Blob, filename: string) => void;

export class AppController {
  state: SessionState = initialState();
  payload: AnalysisPayload | null = null;
  datasets: DatasetInfo[] = [];
  fitCreatedAt: number | null = null;

  private partitionFetcher = new LatestWins();

  constructor(
    public api: ApiClient,
    private onChange: () => void = () => {},
  ) {}

  private message(error: unknown): string {
    return error instanceof ApiError ? error.message : String(error);
  }

  private update(next: SessionState): void {
    this.state = next;
    this.onChange();
  }

  async init(): Promise<void> {
    this.datasets = await this.api.listDatasets();
    this.onChange();
  }

  chooseDataset(id: string | null): void {
    this.update(selectDataset(this.state, id));
  }

  configureTransform(patch: Partial<TransformOptions>): void {
    this.update(setTransform(this.state, patch));
  }

  async uploadDataset(file: Blob, name: string): Promise<void> {
    try {
      const result = await this.api.upload(file, name);
      this.datasets = await this.api.listDatasets();
      this.update(selectDataset(this.state, result.id));
    } catch (error) {
      this.update(computeFailed(this.state, this.message(error)));
    }
  }

  /** Fit (or hit the server cache) and pull the full payload. */
  async compute(): Promise<void> {
    if (!this.state.datasetId) {
      this.update(computeFailed(this.state, 'Pick or upload a dataset first.'));
      return;
    }
    this.update(beginCompute(this.state));
    try {
      const result = await this.api.compute(
        this.state.datasetId,
        this.state.transform,
        this.state.epsilon,
      );
      this.fitCreatedAt = result.fit_created_at;
      this.payload = await this.api.analysis(this.state.datasetId, this.state.epsilon);
      this.update(computeSucceeded(this.state));
    } catch (error) {
      this.payload = null;
      this.update(computeFailed(this.state, this.message(error)));
    }
  }

  /**
   * Slider movement: refetch the payload at the new epsilon (latest wins).
   * Never refits; the returned fit timestamp must match the computed one.
   */
  async changeEpsilon(value: number): Promise<void> {
    this.update(setEpsilon(this.state, value));
    if (!this.state.datasetId || !this.payload) return;
    try {
      const fresh = await this.partitionFetcher.run((signal) =>
        this.api.analysis(this.state.datasetId as string, this.state.epsilon, signal),
      );
      if (fresh) {
        if (this.fitCreatedAt !== null && fresh.fit_created_at !== this.fitCreatedAt) {
          console.warn('epsilon change unexpectedly produced a new fit');
        }
        this.payload = fresh;
        this.update(clearNotice(this.state));
      }
    } catch (error) {
      this.update(requestFailed(this.state, this.message(error)));
    }
  }

  highlight(name: string | null): void {
    this.update(
      selectAlgorithm(this.state, name, this.payload?.dataset.algorithms ?? []),
    );
  }

  /** Guarded download: without a computed analysis, prompt instead of fetching. */
  async download(save: BundleSaver): Promise<boolean> {
    if (!this.state.datasetId || !this.payload) {
      this.update(requestFailed(this.state, 'Compute an analysis before downloading'));
      return false;
    }
    try {
      const blob = await this.api.bundle(this.state.datasetId);
      save(blob, bundleFilename(this.payload.dataset.name, new Date()));
      return true;
    } catch (error) {
      this.update(requestFailed(this.state, this.message(error)));
      return false;
    }
  }
}
