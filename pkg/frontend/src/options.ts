/**
 * User options: blacklisted domains (where the extension must not run at
 * all) and the pane auto-open dwell. Persisted in extension storage when
 * available, localStorage otherwise.
 */

export interface Options {
  blacklist: string[];
  dwellMs: number;
}

export const DEFAULT_OPTIONS: Options = {
  blacklist: [],
  dwellMs: 6000,
};

const STORAGE_KEY = "trustnet.options";

export interface KeyValueStorage {
  get(key: string): Promise<string | null>;
  set(key: string, value: string): Promise<void>;
}

export function localStorageBackend(storage: Storage = localStorage): KeyValueStorage {
  return {
    get: async (key) => storage.getItem(key),
    set: async (key, value) => storage.setItem(key, value),
  };
}

export async function loadOptions(backend: KeyValueStorage): Promise<Options> {
  const raw = await backend.get(STORAGE_KEY);
  if (!raw) return { ...DEFAULT_OPTIONS };
  try {
    const parsed = JSON.parse(raw);
    return {
      blacklist: Array.isArray(parsed.blacklist)
        ? parsed.blacklist.map((h: unknown) => String(h).toLowerCase())
        : [],
      dwellMs:
        typeof parsed.dwellMs === "number" && parsed.dwellMs >= 0
          ? parsed.dwellMs
          : DEFAULT_OPTIONS.dwellMs,
    };
  } catch {
    return { ...DEFAULT_OPTIONS };
  }
}

export async function saveOptions(
  backend: KeyValueStorage,
  options: Options,
): Promise<void> {
  await backend.set(STORAGE_KEY, JSON.stringify(options));
}

/** True when `host` equals a blacklisted domain or is a subdomain of one. */
export function isBlacklisted(host: string, blacklist: string[]): boolean {
  const lower = host.toLowerCase();
  return blacklist.some(
    (entry) => lower === entry || lower.endsWith("." + entry),
  );
}
