import semver from 'semver';
export const ok = (v) => semver.valid(v);
