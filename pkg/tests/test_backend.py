import pytest

from fprisk.backend import BACKENDS, default_backend, get_kernels


class TestSelection:
    def test_env_flag_forces_numpy(self, monkeypatch):
        monkeypatch.setenv("FPRISK_BACKEND", "numpy")
        assert default_backend() == "numpy"
        assert get_kernels().BACKEND_NAME == "numpy"

    def test_env_flag_forces_numba(self, monkeypatch):
        monkeypatch.setenv("FPRISK_BACKEND", "numba")
        assert default_backend() == "numba"
        assert get_kernels().BACKEND_NAME == "numba"

    def test_invalid_env_flag(self, monkeypatch):
        monkeypatch.setenv("FPRISK_BACKEND", "fortran")
        with pytest.raises(ValueError, match="fortran"):
            default_backend()

    def test_default_prefers_numba_when_available(self, monkeypatch):
        monkeypatch.delenv("FPRISK_BACKEND", raising=False)
        assert default_backend() in BACKENDS

    def test_kernel_modules_share_surface(self):
        for name in BACKENDS:
            kernels = get_kernels(name)
            for fn in ("bootstrap_rates", "replicate_counts", "oracle_hits",
                       "sample_binomial"):
                assert callable(getattr(kernels, fn)), (name, fn)
