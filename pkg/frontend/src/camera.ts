/** World <-> screen mapping with pan/zoom, Y up in world coordinates. */

export interface Camera {
  /** world point at the viewport centre */
  cx: number;
  cy: number;
  /** pixels per metre */
  scale: number;
}

export interface Viewport {
  width: number;
  height: number;
}

export const DEFAULT_SCALE = 80; // px per metre

export function worldToScreen(
  cam: Camera, vp: Viewport, wx: number, wy: number,
): [number, number] {
  return [
    vp.width / 2 + (wx - cam.cx) * cam.scale,
    vp.height / 2 - (wy - cam.cy) * cam.scale,
  ];
}

export function screenToWorld(
  cam: Camera, vp: Viewport, sx: number, sy: number,
): [number, number] {
  return [
    cam.cx + (sx - vp.width / 2) / cam.scale,
    cam.cy - (sy - vp.height / 2) / cam.scale,
  ];
}

export function zoom(cam: Camera, factor: number): Camera {
  const scale = Math.min(2000, Math.max(2, cam.scale * factor));
  return { ...cam, scale };
}

export function pan(cam: Camera, dxPx: number, dyPx: number): Camera {
  return {
    ...cam,
    cx: cam.cx - dxPx / cam.scale,
    cy: cam.cy + dyPx / cam.scale,
  };
}
