/* tslint:disable */
/* eslint-disable */

/**
 * Final-time block densities of a step kernel started from one common
 * Gaussian, next to the single-population law with `p` = mean degree.
 */
export class DensityComparison {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    block(i: number): Float64Array;
    block_count(): number;
    centers(): Float64Array;
    /**
     * `L¹` distance of each block density from the mean-field density.
     */
    gaps(): Float64Array;
    meanfield(): Float64Array;
    /**
     * Block measures.
     */
    weights(): Float64Array;
}

export function compare_densities(spec: string, coefficients: string, horizon: number, init_mean: number, init_sd: number): DensityComparison;

/**
 * Cut norm of `a − b` after approximating analytic kernels by `blocks`
 * steps; both are averaged onto their common refinement first.
 */
export function cut_norm_between(a: string, b: string, blocks: number): number;

/**
 * Degrees `d(x)` at `points` evenly spaced labels.
 */
export function degree_profile(spec: string, points: number): Float64Array;

/**
 * `W` at the centers of a `cells × cells` grid, row-major.
 */
export function kernel_heatmap(spec: string, cells: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_densitycomparison_free: (a: number, b: number) => void;
    readonly compare_densities: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly cut_norm_between: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly degree_profile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly densitycomparison_block: (a: number, b: number) => [number, number];
    readonly densitycomparison_block_count: (a: number) => number;
    readonly densitycomparison_centers: (a: number) => [number, number];
    readonly densitycomparison_gaps: (a: number) => [number, number];
    readonly densitycomparison_meanfield: (a: number) => [number, number];
    readonly densitycomparison_weights: (a: number) => [number, number];
    readonly kernel_heatmap: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
