import hashlib
import json
import logging
import math
from pathlib import Path

from Models.ABParams import ABParams
from Models.CurvePoint import CurvePoint, CurveParams, DssSignature
from Models.Share import Share, Commitment
from Models.Signing import SignatureRecord
from Models.SplitMode import SplitMode
from Curve.Curve import curve_digest
from ModMath.ModMath import to_hex, from_hex

logger = logging.getLogger(__name__)

SHARE_FILE_VERSION = 1


class FileFormatError(ValueError):
    pass


def read_json(path: str | Path) -> dict:
    with open(path, "r") as file:
        return json.loads(file.read())


def dump_json(data, pretty: bool = False) -> str:
    return json.dumps(data, indent=2 if pretty else None, sort_keys=True)


def write_json(path: str | Path, data, pretty: bool = False):
    with open(path, "w") as file:
        file.write(dump_json(data, pretty) + "\n")


def _int(data: dict, key: str) -> int:
    try:
        return from_hex(str(data[key]))
    except KeyError:
        raise FileFormatError(f"missing field {key!r}") from None
    except ValueError:
        raise FileFormatError(f"field {key!r} is not hex") from None


def params_to_dict(params: ABParams) -> dict:
    return {
        "m0": to_hex(params.m0),
        "moduli": [to_hex(m) for m in params.moduli],
        "verif_primes": [to_hex(p) for p in params.verif_primes],
        "t": to_hex(params.t),
        "n": to_hex(params.n),
    }


def params_from_dict(data: dict) -> ABParams:
    t = _int(data, "t")
    pairs = sorted(zip((from_hex(m) for m in data.get("moduli", [])), (from_hex(p) for p in data.get("verif_primes", []))))
    moduli = [m for m, _ in pairs]
    return ABParams(m0=_int(data, "m0"), moduli=moduli, verif_primes=[p for _, p in pairs], t=t, n=_int(data, "n"),
                    capacity=math.prod(moduli[:t]))


def params_digest(params: ABParams) -> str:
    return hashlib.sha256(dump_json(params_to_dict(params)).encode()).hexdigest()


def commitment_to_dict(commitment: Commitment) -> dict:
    return {"index": commitment.index, "p": to_hex(commitment.p), "g": to_hex(commitment.g),
            "z": to_hex(commitment.z)}


def commitment_from_dict(data: dict) -> Commitment:
    return Commitment(index=int(data["index"]), p=_int(data, "p"), g=_int(data, "g"), z=_int(data, "z"))


def share_to_dict(share: Share, commitment: Commitment, mode: SplitMode) -> dict:
    data = commitment_to_dict(commitment)
    data.pop("index")
    return {
        "version": SHARE_FILE_VERSION,
        "index": share.index,
        "modulus": to_hex(share.modulus),
        "value": to_hex(share.value),
        "commitment": data,
        "mode": mode.value,
    }


def share_from_dict(data: dict) -> tuple[Share, Commitment, SplitMode]:
    if data.get("version") != SHARE_FILE_VERSION:
        raise FileFormatError(f"unsupported share file version {data.get('version')!r}")
    index = int(data["index"])
    share = Share(index=index, value=_int(data, "value"), modulus=_int(data, "modulus"))
    commitment = commitment_from_dict({"index": index, **data["commitment"]})
    return share, commitment, SplitMode(data["mode"])


def bulletin_to_dict(params: ABParams, commitments) -> dict:
    return {
        "params_digest": params_digest(params),
        "commitments": [commitment_to_dict(c) for c in sorted(commitments, key=lambda c: c.index)],
    }


def bulletin_commitment(data: dict, index: int) -> Commitment:
    for entry in data.get("commitments", []):
        if int(entry["index"]) == index:
            return commitment_from_dict(entry)
    raise FileFormatError(f"bulletin has no commitment for index {index}")


def point_from_json(data) -> CurvePoint:
    if data == "O":
        return CurvePoint.identity()
    return CurvePoint(x=_int(data, "x"), y=_int(data, "y"))


def curve_from_dict(data: dict) -> CurveParams:
    return CurveParams(name=data.get("name", ""), p=_int(data, "p"), a=_int(data, "a"), b=_int(data, "b"),
                       generator=point_from_json(data["generator"]), q=_int(data, "q"))


def signature_record(signature: DssSignature, kappa: int, curve: CurveParams) -> SignatureRecord:
    return SignatureRecord(r=to_hex(signature.r), s=to_hex(signature.s), kappa=kappa, curve=curve_digest(curve))
