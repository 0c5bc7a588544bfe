/* tslint:disable */
/* eslint-disable */

/**
 * One augmentation through a `rows`-row page matrix.
 */
export function augment_series(values: Float64Array, rows: number, beta_u: number, beta_v: number, smooth: number, seed: bigint): Float64Array;

/**
 * Quasi-periodic test signal with occasional spikes.
 */
export function demo_signal(len: number): Float64Array;

/**
 * `steps + 1` series along one geodesic, concatenated.
 */
export function geodesic_series(values: Float64Array, rows: number, beta: number, smooth: number, steps: number, seed: bigint): Float64Array;

/**
 * Great-circle perturbation of the normalized signal.
 */
export function sphere_gen(values: Float64Array, t: number, boundary: number, smooth: number, seed: bigint): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly augment_series: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
    readonly demo_signal: (a: number) => [number, number];
    readonly geodesic_series: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
    readonly sphere_gen: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
