/** Layer comparison: two hillshade rasters under one opacity slider.
 * Slider at 0 shows epoch A only, at 1 epoch B only. */

export interface LayerOpacities {
  a: number;
  b: number;
}

export function sliderOpacities(t: number): LayerOpacities {
  const clamped = Math.min(1, Math.max(0, t));
  return { a: 1 - clamped, b: clamped };
}

/** CSS style snippets for the two stacked raster layers. */
export function layerStyles(t: number): { a: string; b: string } {
  const o = sliderOpacities(t);
  return { a: `opacity: ${o.a}`, b: `opacity: ${o.b}` };
}
