/**
 * Batch scheduling for link-status lookups: request order is preserved,
 * each batch honors the API's 200-URL cap, and batches are spread out
 * by a fixed delay so one busy page does not burst the backend.
 */

import { BATCH_CAP } from "./api";

export interface BatchOptions {
  batchSize?: number;
  interBatchDelayMs?: number;
}

export const DEFAULT_INTER_BATCH_DELAY_MS = 250;

export function chunk<T>(items: T[], size: number): T[][] {
  if (size < 1) throw new Error("batch size must be >= 1");
  const out: T[][] = [];
  for (let i = 0; i < items.length; i += size) {
    out.push(items.slice(i, i + size));
  }
  return out;
}

/**
 * Dispatch `handler` once per batch; batch i runs at i * delay. Returns a
 * promise that settles when every batch finished. Handler failures are
 * contained per batch (a failed batch never blocks the following ones).
 */
export function dispatchBatches<T>(
  items: T[],
  handler: (batch: T[], index: number) => Promise<void>,
  options: BatchOptions = {},
): Promise<void> {
  const size = options.batchSize ?? BATCH_CAP;
  const delay = options.interBatchDelayMs ?? DEFAULT_INTER_BATCH_DELAY_MS;
  const batches = chunk(items, size);
  if (batches.length === 0) return Promise.resolve();
  return new Promise((resolve) => {
    let settled = 0;
    batches.forEach((batch, index) => {
      setTimeout(() => {
        handler(batch, index)
          .catch(() => undefined)
          .finally(() => {
            settled += 1;
            if (settled === batches.length) resolve();
          });
      }, index * delay);
    });
  });
}
