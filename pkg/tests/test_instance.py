import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwslasso import GeneratorConfig, Instance, generate, read_instance, \
    write_instance
from dwslasso.errors import FormatError
from dwslasso.instance import ORTHO_TOL
from dwslasso.rng import Stream


def test_k_rule_resolution():
    cfg = GeneratorConfig(n=1000, s=10, c=2.0, seed=42)
    assert cfg.resolved_k == math.ceil(20 * math.log(100)) == 93


def test_explicit_k_wins():
    assert GeneratorConfig(n=100, s=5, k=40).resolved_k == 40


def test_k_and_c_together_rejected():
    with pytest.raises(ValueError, match="not both"):
        GeneratorConfig(n=100, s=5, k=40, c=2.0)


def test_k_exceeding_n_rejected():
    with pytest.raises(ValueError, match="orthonormalize"):
        GeneratorConfig(n=30, s=5, k=31)


def test_s_bounds_enforced():
    with pytest.raises(ValueError, match="0 < s < k"):
        GeneratorConfig(n=100, s=40, k=40)


def test_alpha_range_enforced():
    with pytest.raises(ValueError, match="eta_alpha"):
        GeneratorConfig(n=100, s=5, eta_alpha=1.0)


def test_generated_signal_structure():
    inst = generate(GeneratorConfig(n=1000, s=10, c=2.0, seed=42))
    assert inst.k == 93
    nz = inst.z_true[inst.z_true != 0]
    assert nz.size == 10
    assert set(np.unique(nz)) <= {-1.0, 1.0}


def test_rows_orthonormal():
    inst = generate(GeneratorConfig(n=400, s=6, seed=1))
    gram = inst.a @ inst.a.T - np.eye(inst.k)
    assert np.abs(gram).max() <= ORTHO_TOL


def test_singular_values_all_one():
    # 50 seeded configs across sizes
    seeds = range(50)
    for seed in seeds:
        n = 60 + 7 * (seed % 9)
        s = 2 + seed % 4
        inst = generate(GeneratorConfig(n=n, s=s, seed=seed))
        sv = np.linalg.svd(inst.a, compute_uv=False)
        assert sv.min() >= 1 - 1e-8 and sv.max() <= 1 + 1e-8


def test_eta_strictly_below_atb_norm():
    for seed in range(5):
        inst = generate(GeneratorConfig(n=200, s=4, seed=seed))
        assert inst.eta < np.abs(inst.a.T @ inst.b).max()


def test_eta_recorded_from_generated_observation():
    inst = generate(GeneratorConfig(n=200, s=4, seed=3, eta_alpha=0.25))
    assert inst.eta == pytest.approx(0.25 * np.abs(inst.a.T @ inst.b).max())


def test_generation_deterministic():
    cfg = GeneratorConfig(n=300, s=5, seed=99)
    a = generate(cfg)
    b = generate(cfg)
    assert a.a.tobytes() == b.a.tobytes()
    assert a.b.tobytes() == b.b.tobytes()
    assert a.z_true.tobytes() == b.z_true.tobytes()
    assert a.eta == b.eta


def test_distinct_seeds_differ():
    x = generate(GeneratorConfig(n=200, s=4, seed=0))
    y = generate(GeneratorConfig(n=200, s=4, seed=1))
    assert x.a.tobytes() != y.a.tobytes()


def test_normalized_observation():
    inst = generate(GeneratorConfig(n=200, s=4, seed=7, normalize_b=True))
    assert np.linalg.norm(inst.b) == pytest.approx(1.0)
    assert inst.eta == pytest.approx(
        inst.eta_alpha * np.abs(inst.a.T @ inst.b).max())


def test_roundtrip_bit_exact(tmp_path):
    inst = generate(GeneratorConfig(n=250, s=5, seed=42))
    path = tmp_path / "i.csi"
    write_instance(path, inst)
    back = read_instance(path)
    assert back.a.tobytes() == inst.a.tobytes()
    assert back.b.tobytes() == inst.b.tobytes()
    assert back.z_true.tobytes() == inst.z_true.tobytes()
    assert back.eta == inst.eta
    assert back.eta_alpha == inst.eta_alpha
    assert back.seed == inst.seed
    assert back.s == inst.s
    assert back.a.flags.f_contiguous


def test_roundtrip_without_signal(tmp_path):
    inst = generate(GeneratorConfig(n=100, s=3, seed=1))
    stripped = Instance(a=inst.a, b=inst.b, eta=inst.eta, z_true=None,
                        seed=inst.seed, s=inst.s, eta_alpha=inst.eta_alpha)
    path = tmp_path / "noz.csi"
    write_instance(path, stripped)
    back = read_instance(path)
    assert back.z_true is None
    assert back.b.tobytes() == inst.b.tobytes()


def test_wrong_magic_rejected(tmp_path):
    path = tmp_path / "bad.csi"
    path.write_bytes(b"NOPE" + bytes(100))
    with pytest.raises(FormatError, match="magic") as exc:
        read_instance(path)
    assert exc.value.offset == 0


def test_empty_file_truncated_header(tmp_path):
    path = tmp_path / "empty.csi"
    path.write_bytes(b"")
    with pytest.raises(FormatError, match="truncated header"):
        read_instance(path)


def test_truncated_payload_names_offset(tmp_path):
    inst = generate(GeneratorConfig(n=100, s=3, seed=5))
    path = tmp_path / "trunc.csi"
    write_instance(path, inst)
    data = path.read_bytes()
    path.write_bytes(data[:len(data) // 2])
    with pytest.raises(FormatError, match=r"truncated .* \(at byte \d+\)"):
        read_instance(path)


def test_version_mismatch_rejected(tmp_path):
    inst = generate(GeneratorConfig(n=100, s=3, seed=5))
    path = tmp_path / "ver.csi"
    write_instance(path, inst)
    data = bytearray(path.read_bytes())
    data[4] = 99
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError, match="version") as exc:
        read_instance(path)
    assert exc.value.offset == 4


@given(st.integers(min_value=0, max_value=100))
@settings(max_examples=40, deadline=None)
def test_any_truncation_is_a_clean_format_error(tmp_path_factory, percent):
    inst = generate(GeneratorConfig(n=50, s=2, k=10, seed=8))
    path = tmp_path_factory.mktemp("trunc") / "t.csi"
    write_instance(path, inst)
    data = path.read_bytes()
    cut = len(data) * percent // 100
    if cut == len(data):
        return
    path.write_bytes(data[:cut])
    with pytest.raises(FormatError):
        read_instance(path)


def test_trailing_garbage_rejected(tmp_path):
    inst = generate(GeneratorConfig(n=100, s=3, seed=5))
    path = tmp_path / "trail.csi"
    write_instance(path, inst)
    path.write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(FormatError, match="trailing"):
        read_instance(path)


def test_stream_determinism():
    a = Stream(123).normals(11)
    b = Stream(123).normals(11)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, Stream(124).normals(11))


def test_stream_golden_words():
    # the counter stream is an on-disk compatibility promise (format
    # version 1); these words must never change
    np.testing.assert_array_equal(
        Stream(0).raw(4),
        np.array([213000021201967259, 4455796210202625458,
                  2055444239878205049, 10411612076246414556],
                 dtype=np.uint64))
    np.testing.assert_array_equal(
        Stream(42).raw(2),
        np.array([15129985323320379406, 3490965594592278910],
                 dtype=np.uint64))


def test_header_layout_golden_bytes(tmp_path):
    inst = generate(GeneratorConfig(n=50, s=2, k=10, seed=3))
    path = tmp_path / "h.csi"
    write_instance(path, inst)
    head = path.read_bytes()[:61]
    assert head[:4] == b"CSI1"
    assert int.from_bytes(head[4:8], "little") == 1
    assert int.from_bytes(head[8:16], "little") == 10    # k
    assert int.from_bytes(head[16:24], "little") == 50   # n
    assert int.from_bytes(head[24:32], "little") == 2    # s
    assert np.frombuffer(head[32:40], "<f8")[0] == inst.eta
    assert np.frombuffer(head[40:48], "<f8")[0] == 0.1   # eta_alpha
    assert int.from_bytes(head[48:56], "little") == 3    # seed
    assert head[56] == 1                                 # has_z
    assert len(path.read_bytes()) == 57 + 8 * (10 * 50 + 10 + 50)


def test_instance_arrays_are_write_protected():
    inst = generate(GeneratorConfig(n=60, s=2, k=10, seed=1))
    with pytest.raises(ValueError):
        inst.a[0, 0] = 99.0
    with pytest.raises(ValueError):
        inst.b[0] = 99.0


def test_concurrent_runs_are_deterministic():
    from concurrent.futures import ThreadPoolExecutor

    import dwslasso as dl

    insts = [generate(GeneratorConfig(n=150, s=4, seed=seed))
             for seed in range(4)]
    sequential = [dl.run_dws(inst).x for inst in insts]
    with ThreadPoolExecutor(max_workers=4) as pool:
        concurrent = list(pool.map(lambda i: dl.run_dws(i).x, insts))
    for xs, xc in zip(sequential, concurrent):
        assert xs.tobytes() == xc.tobytes()


def test_stream_substreams_independent():
    a = Stream(5, substream=0).raw(4)
    b = Stream(5, substream=1).raw(4)
    assert not np.array_equal(a, b)


def test_stream_choose_is_sorted_unique():
    idx = Stream(9).choose(50, 12)
    assert idx.size == 12
    assert np.all(np.diff(idx) > 0)
    assert idx.min() >= 0 and idx.max() < 50


def test_stream_normals_moments():
    z = Stream(2).normals(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
