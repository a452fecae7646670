import json
import subprocess
import sys

from mvphi.coeff import Params
from mvphi.mvring import MvLaurent
from mvphi.phimod import unramified_char
from mvphi import serialize as ser


def run_cli(args, stdin=None):
    proc = subprocess.run([sys.executable, "-m", "mvphi"] + args,
                          capture_output=True, text=True, input=stdin)
    return proc


def test_phi_y_p2_example():
    proc = run_cli(["phi-y", "--p", "2", "--f", "1"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    entry = data["phi_y"][0]
    assert entry["congruence_mod_p"] is True
    assert entry["str"] in ("2*Y + Y^2", "Y^2 + 2*Y")


def test_phi_y_p3_congruence():
    proc = run_cli(["phi-y", "--p", "3", "--f", "1"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert all(e["congruence_mod_p"] for e in data["phi_y"])


def test_gamma_y_identity_unit():
    proc = run_cli(["gamma-y", "--p", "3", "--f", "1", "--a", "1"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    entry = data["gamma_y"][0]
    assert entry["series"]["terms"] == [{"coeff": [1], "exponents": [1]}]


def test_gamma_y_rejects_non_unit():
    proc = run_cli(["gamma-y", "--p", "3", "--f", "1", "--a", "3"])
    assert proc.returncode == 2


def test_iota_digits_p2():
    proc = run_cli(["iota", "--p", "2", "--f", "1", "--prec", "2"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["stabilization_ok"] is True
    witt = data["generators"][0]["witt"]
    assert witt["prec"] == 2
    digits = witt["digits"]
    assert digits[0]["terms"][0]["y0"] == {"num": 1, "den": 1}
    assert digits[1]["terms"][0]["y0"] == {"num": 1, "den": 2}
    assert all(row["ok"] for row in data["norm_table"])


def test_norm_roundtrip_stdin():
    pr = Params.create(3, 1, 1)
    x = MvLaurent.monomial(pr, -2, None, 3)
    payload = json.dumps(ser.mv_json(x))
    proc = run_cli(["norm", "--p", "3", "--f", "1", "--s", "2"],
                   stdin=payload)
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["norm"]["exponent"] == {"num": 0, "den": 1}
    assert data["norm"]["certified"] is True


def test_decompose_roundtrip_cli():
    pr = Params.create(3, 1, 1)
    x = MvLaurent.monomial(pr, 4) + MvLaurent.monomial(pr, 1, None, 2)
    proc = run_cli(["decompose", "--p", "3", "--f", "1"],
                   stdin=json.dumps(ser.mv_json(x)))
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["roundtrip"] is True
    assert len(data["components"]) == 3


def test_etale_cli():
    pr = Params.create(3, 1, 1)
    m = unramified_char(pr, __import__("mvphi.coeff", fromlist=["oe_ring"])
                        .oe_ring(pr).from_int(2, pr.N))
    proc = run_cli(["etale", "--p", "3", "--f", "1"],
                   stdin=json.dumps(ser.phimodule_json(m)))
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["is_etale"] is True and data["commutation"] is True


def test_oc_cert_cli():
    pr = Params.create(3, 1, 1)
    from mvphi.coeff import oe_ring
    m = unramified_char(pr, oe_ring(pr).from_int(2, pr.N))
    payload = json.dumps({"module": ser.phimodule_json(m)})
    proc = run_cli(["oc-cert", "--p", "3", "--f", "1", "--s", "1"],
                   stdin=payload)
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["ok"] is True and data["s"] == 1


def test_check_suite_and_unknown_suite():
    proc = run_cli(["check", "--suite", "frobenius", "--p", "3", "--f", "1"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["report"]["ok"] is True
    bad = run_cli(["check", "--suite", "nope", "--p", "3", "--f", "1"])
    assert bad.returncode == 2


def test_check_witt_suite_ghost_oracle():
    proc = run_cli(["check", "--suite", "witt", "--p", "3", "--f", "1"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    ids = {a["id"]: a["ok"] for a in data["report"]["assertions"]}
    assert ids["witt/ghost-identities"] is True


def test_determinism_byte_identical():
    args = ["check", "--suite", "witt", "--p", "2", "--f", "1",
            "--seed", "7"]
    a = run_cli(args)
    b = run_cli(args)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 5, "f": 1, "prec": 2}))
    proc = run_cli(["phi-y", "--config", str(cfg), "--prec", "3"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["config"]["p"] == 5 and data["config"]["prec"] == 3


def test_out_file(tmp_path):
    out = tmp_path / "result.json"
    proc = run_cli(["phi-y", "--p", "2", "--f", "1", "--out", str(out)])
    assert proc.returncode == 0
    data = json.loads(out.read_text())
    assert data["phi_y"][0]["congruence_mod_p"] is True


def test_serialize_roundtrips():
    pr = Params.create(3, 2, 2)
    x = MvLaurent.monomial(pr, -1, (2,), 4) + MvLaurent.monomial(pr, 3)
    back = ser.mv_from(pr, json.loads(json.dumps(ser.mv_json(x))))
    assert back.terms == x.terms and back.w_hi == x.w_hi
    from mvphi.iwasawa import y_generator
    s = y_generator(pr, 1)
    back_s = ser.tseries_from(pr, json.loads(json.dumps(ser.tseries_json(s))))
    assert back_s == s
    from mvphi.perfd import ainf_ring, PerfLaurent
    ring = ainf_ring(pr)
    from fractions import Fraction
    pl = PerfLaurent.monomial(ring, (Fraction(1, 3), Fraction(-2, 9)))
    back_p = ser.perf_from(ring, json.loads(json.dumps(ser.perf_json(pl))))
    assert back_p.terms == pl.terms
