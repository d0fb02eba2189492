// Destination picker ordering, matching the server's catalog semantics:
// empty query lists recents first (most recent first) then the rest
// alphabetically; a query filters by case-insensitive name substring.

export interface PoiLite {
  id: string;
  name: string;
}

function byName(a: PoiLite, b: PoiLite): number {
  const an = a.name.toLowerCase();
  const bn = b.name.toLowerCase();
  if (an !== bn) return an < bn ? -1 : 1;
  return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
}

export function searchDestinations<T extends PoiLite>(
  pois: readonly T[],
  query: string,
  recents: readonly string[] = [],
): T[] {
  if (query) {
    const q = query.toLowerCase();
    return pois.filter((p) => p.name.toLowerCase().includes(q)).sort(byName);
  }
  const byId = new Map(pois.map((p) => [p.id, p]));
  const head: T[] = [];
  for (const id of recents) {
    const poi = byId.get(id);
    if (poi && !head.includes(poi)) head.push(poi);
  }
  const seen = new Set(head.map((p) => p.id));
  const tail = pois.filter((p) => !seen.has(p.id)).sort(byName);
  return [...head, ...tail];
}
