/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_densitycomparison_free: (a: number, b: number) => void;
export const compare_densities: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const cut_norm_between: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const degree_profile: (a: number, b: number, c: number) => [number, number, number, number];
export const densitycomparison_block: (a: number, b: number) => [number, number];
export const densitycomparison_block_count: (a: number) => number;
export const densitycomparison_centers: (a: number) => [number, number];
export const densitycomparison_gaps: (a: number) => [number, number];
export const densitycomparison_meanfield: (a: number) => [number, number];
export const densitycomparison_weights: (a: number) => [number, number];
export const kernel_heatmap: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
