export * from "./types.js";
export * from "./geometry.js";
export * from "./viewState.js";
export * from "./debounce.js";
export * from "./api.js";
export * from "./editor.js";
export * from "./render.js";
