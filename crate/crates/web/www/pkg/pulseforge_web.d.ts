/* tslint:disable */
/* eslint-disable */

/**
 * Time-optimal bounded control for `e^{−iθσx/2}` under `ωσx/2 + Jσy/2`.
 */
export function bang_bang_schedule(theta: number, coupling: number, omega_min: number, omega_max: number): string;

/**
 * Drive qubit 1 with `A cos(υt)` for `T` and measure how entangling the result is.
 */
export function locality_probe(amplitude: number, frequency: number, duration: number, coupling: number): string;

/**
 * Pulse for `e^{−iγ1σx/2} ⊗ e^{−iγ2σx/2}` with the named strategy
 * (`approximate`, `optimized`, `min-energy`, `bang-bang`).
 */
export function synthesize_pulse(gamma1: number, gamma2: number, coupling: number, strategy: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bang_bang_schedule: (a: number, b: number, c: number, d: number) => [number, number];
    readonly locality_probe: (a: number, b: number, c: number, d: number) => [number, number];
    readonly synthesize_pulse: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
