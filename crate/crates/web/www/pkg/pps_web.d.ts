/* tslint:disable */
/* eslint-disable */

/**
 * The classicality report as a two-column table.
 */
export function classicality_table(model_name: string, preparation: string): string;

/**
 * Names, preparations and measurements of every built-in model.
 */
export function models(): string;

/**
 * Plays `rounds` rounds and returns the ledger and, when every choice has
 * enough rounds, the umpire's post-selection frequencies.
 */
export function play_game(model_name: string, preparation: string, strategy: string, p: number, rounds: number, seed: bigint, odds: string): string;

/**
 * Joint distribution of a comma-separated measurement sequence.
 */
export function sequence_table(model_name: string, preparation: string, sequence: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly classicality_table: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly models: () => [number, number];
    readonly play_game: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint, j: number, k: number) => [number, number, number, number];
    readonly sequence_table: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
