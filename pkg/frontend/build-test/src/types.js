/** Wire types mirroring the camscout HTTP API. */
export const LABELS = ['NetworkCamera', 'OtherWebAsset'];
