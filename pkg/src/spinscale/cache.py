"""On-disk spectrum cache.

Layout: <cachedir>/<model>/<hash>/{meta.json, evals.bin, evecs.bin}, one
entry per (model, alpha, k, J, sector).  Binary payloads are little-endian
64-bit floats (complex stored as interleaved re/im); meta.json records the
parameters, array shapes, and sha256 content hashes that key the entry.
Writes go to a temp directory renamed into place, so concurrent writers of
the same entry cannot interleave.
"""

import hashlib
import json
import os
import shutil
import tempfile

import numpy as np

from .errors import CacheCorruption


def entry_key(model: str, alpha: float, k: float, j: int, sector: str) -> str:
    """Directory name for one cache entry: hash of the canonical parameters."""
    canon = json.dumps({"model": model, "alpha": repr(float(alpha)),
                        "k": repr(float(k)), "j": int(j), "sector": sector},
                       sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def entry_dir(cachedir, model, alpha, k, j, sector) -> str:
    return os.path.join(str(cachedir), model, entry_key(model, alpha, k, j, sector))


def _sha256(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def store(cachedir, model, alpha, k, j, sector, evals, evecs=None):
    """Write one cache entry atomically; an existing entry is left alone."""
    path = entry_dir(cachedir, model, alpha, k, j, sector)
    if os.path.isdir(path):
        return path
    evals = np.ascontiguousarray(evals, dtype="<f8")
    evals_bytes = evals.tobytes()
    meta = {
        "model": model, "alpha": float(alpha), "k": float(k), "j": int(j),
        "sector": sector, "n_levels": int(len(evals)),
        "evals_sha256": _sha256(evals_bytes),
        "evecs_shape": None, "evecs_complex": None, "evecs_sha256": None,
    }
    evecs_bytes = None
    if evecs is not None:
        is_complex = np.iscomplexobj(evecs)
        evecs = np.ascontiguousarray(evecs, dtype="<c16" if is_complex else "<f8")
        evecs_bytes = evecs.tobytes()
        meta["evecs_shape"] = list(evecs.shape)
        meta["evecs_complex"] = is_complex
        meta["evecs_sha256"] = _sha256(evecs_bytes)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=os.path.basename(path) + ".tmp-",
                           dir=os.path.dirname(path))
    try:
        with open(os.path.join(tmp, "evals.bin"), "wb") as fh:
            fh.write(evals_bytes)
        if evecs_bytes is not None:
            with open(os.path.join(tmp, "evecs.bin"), "wb") as fh:
                fh.write(evecs_bytes)
        with open(os.path.join(tmp, "meta.json"), "w") as fh:
            json.dump(meta, fh, indent=1, sort_keys=True)
        try:
            os.rename(tmp, path)
        except OSError:
            # a concurrent writer finished first; keep theirs
            shutil.rmtree(tmp, ignore_errors=True)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return path


def load(cachedir, model, alpha, k, j, sector, need_vectors: bool = False):
    """Load one entry; None on miss (or when vectors are needed but absent).

    Raises CacheCorruption when a payload fails its recorded content hash.
    """
    path = entry_dir(cachedir, model, alpha, k, j, sector)
    meta_path = os.path.join(path, "meta.json")
    if not os.path.isfile(meta_path):
        return None
    with open(meta_path) as fh:
        meta = json.load(fh)
    with open(os.path.join(path, "evals.bin"), "rb") as fh:
        evals_bytes = fh.read()
    if _sha256(evals_bytes) != meta["evals_sha256"]:
        raise CacheCorruption(f"evals hash mismatch in {path}")
    evals = np.frombuffer(evals_bytes, dtype="<f8")
    if not need_vectors:
        return evals, None
    if meta["evecs_shape"] is None:
        return None
    with open(os.path.join(path, "evecs.bin"), "rb") as fh:
        evecs_bytes = fh.read()
    if _sha256(evecs_bytes) != meta["evecs_sha256"]:
        raise CacheCorruption(f"evecs hash mismatch in {path}")
    dtype = "<c16" if meta["evecs_complex"] else "<f8"
    evecs = np.frombuffer(evecs_bytes, dtype=dtype).reshape(meta["evecs_shape"])
    return evals, evecs


def drop(cachedir, model, alpha, k, j, sector):
    """Remove one entry (used after a corruption hit, before recomputing)."""
    shutil.rmtree(entry_dir(cachedir, model, alpha, k, j, sector),
                  ignore_errors=True)
