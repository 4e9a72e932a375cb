/**
 * Trailing-edge debouncer: rapid calls collapse into one invocation with the
 * latest arguments after `delayMs` of quiet. `flush` fires a pending call
 * immediately (used on drag release), `cancel` drops it.
 */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): { call: (...args: A) => void; flush: () => void; cancel: () => void; pending: () => boolean } {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let lastArgs: A | null = null;

  const fire = () => {
    timer = null;
    if (lastArgs !== null) {
      const args = lastArgs;
      lastArgs = null;
      fn(...args);
    }
  };

  return {
    call: (...args: A) => {
      lastArgs = args;
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(fire, delayMs);
    },
    flush: () => {
      if (timer !== null) clearTimeout(timer);
      fire();
    },
    cancel: () => {
      if (timer !== null) clearTimeout(timer);
      timer = null;
      lastArgs = null;
    },
    pending: () => lastArgs !== null,
  };
}
