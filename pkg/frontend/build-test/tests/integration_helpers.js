/** Narrow views of session state used by the integration assertions. */
export {};
