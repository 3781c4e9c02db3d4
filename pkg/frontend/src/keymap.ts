/** Zone letters, display names and the floor-grid color scheme.
 *
 * One keystroke = one label: the key IS the canonical zone code, and the
 * legend colors match the colored floor markers coders see in the video.
 */

export const ZONE_CODES = ["i", "p", "s", "x"] as const;
export type ZoneCode = (typeof ZONE_CODES)[number];

export const ZONE_NAMES: Record<ZoneCode, string> = {
  i: "intimate",
  p: "personal",
  s: "social",
  x: "off-screen",
};

export const ZONE_COLORS: Record<ZoneCode, string> = {
  i: "#d62728", // red
  p: "#ff7f0e", // orange
  s: "#9467bd", // purple
  x: "#999999", // grey: off the grid entirely
};

/** Number keys select tracks; groups top out at four members. */
export const TRACK_KEYS = ["1", "2", "3", "4"] as const;

export function isZoneKey(key: string): key is ZoneCode {
  return (ZONE_CODES as readonly string[]).includes(key);
}
