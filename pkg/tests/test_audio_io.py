import logging
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emoprep.audio_io import AudioBuffer, read_wav, resample, write_wav
from emoprep.errors import EmptyAudio, InvalidRate, MalformedWav, UnsupportedEncoding


def riff(fmt_tag, channels, rate, bits, payload, extra_fmt=b""):
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", fmt_tag, channels, rate, rate * block, block, bits) + extra_fmt
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_pcm16_normalisation(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(riff(1, 1, 16000, 16, struct.pack("<h", 32767)))
    buf = read_wav(p)
    assert buf.sample_rate == 16000
    assert buf.samples.tolist() == pytest.approx([32767 / 32768])


def test_stereo_is_averaged(tmp_path, caplog):
    p = tmp_path / "s.wav"
    p.write_bytes(riff(1, 2, 8000, 16, struct.pack("<hh", 1000, 3000)))
    with caplog.at_level(logging.WARNING):
        buf = read_wav(p)
    assert buf.samples[0] == pytest.approx(2000 / 32768)
    assert "downmixing" in caplog.text


def test_float32_read(tmp_path):
    p = tmp_path / "f.wav"
    p.write_bytes(riff(3, 1, 22050, 32, np.array([0.25, -0.5, 2.0], "<f4").tobytes()))
    buf = read_wav(p)
    # out-of-range floats are clipped into [-1, 1]
    np.testing.assert_array_equal(buf.samples, np.array([0.25, -0.5, 1.0], np.float32))


def test_extensible_float_read(tmp_path):
    ext = struct.pack("<HHI", 22, 32, 0) + struct.pack("<H", 3) + bytes(14)
    p = tmp_path / "x.wav"
    p.write_bytes(riff(0xFFFE, 1, 16000, 32, np.array([0.5], "<f4").tobytes(), ext))
    assert read_wav(p).samples.tolist() == [0.5]


@pytest.mark.parametrize("tag,bits", [(7, 8), (1, 8), (2, 4), (1, 24)])
def test_unsupported_encodings(tmp_path, tag, bits):
    p = tmp_path / "u.wav"
    p.write_bytes(riff(tag, 1, 8000, bits, bytes(8)))
    with pytest.raises(UnsupportedEncoding):
        read_wav(p)


def test_malformed_headers(tmp_path):
    p = tmp_path / "m.wav"
    p.write_bytes(b"RIFX" + bytes(40))
    with pytest.raises(MalformedWav):
        read_wav(p)
    good = riff(1, 1, 8000, 16, bytes(8))
    p.write_bytes(good[:-4])  # truncated: sizes now lie
    with pytest.raises(MalformedWav):
        read_wav(p)


def test_empty_data_chunk(tmp_path):
    p = tmp_path / "e.wav"
    p.write_bytes(riff(1, 1, 8000, 16, b""))
    with pytest.raises(EmptyAudio):
        read_wav(p)


def test_write_empty_rejected(tmp_path):
    with pytest.raises(EmptyAudio):
        write_wav(AudioBuffer(np.zeros(0), 22050), tmp_path / "x.wav")


def test_silence_byte_layout(tmp_path):
    p = tmp_path / "z.wav"
    write_wav(AudioBuffer(np.zeros(22050), 22050), p)
    data = p.read_bytes()
    i = data.index(b"data")
    size = struct.unpack_from("<I", data, i + 4)[0]
    assert size == 44100
    assert data[i + 8:i + 8 + size] == bytes(44100)
    assert struct.unpack_from("<HHI", data, data.index(b"fmt ") + 8) == (1, 1, 22050)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4000), st.integers(0, 2**32 - 1))
def test_roundtrip_within_one_lsb(tmp_path_factory, n, seed):
    x = np.random.default_rng(seed).uniform(-1, 1, n)
    buf = AudioBuffer(x, 16000)
    p = tmp_path_factory.mktemp("rt") / "r.wav"
    write_wav(buf, p)
    back = read_wav(p)
    assert back.sample_rate == 16000
    assert np.max(np.abs(back.samples.astype(float) - buf.samples.astype(float))) <= 1 / 32768


def test_buffer_validation():
    with pytest.raises(InvalidRate):
        AudioBuffer(np.zeros(4), 0)
    with pytest.raises(ValueError):
        AudioBuffer(np.zeros((2, 2)), 8000)


def test_resample_identity_is_exact():
    x = np.random.default_rng(0).uniform(-1, 1, 1001)
    buf = AudioBuffer(x, 44100)
    out = resample(buf, 44100)
    assert out.sample_rate == 44100
    np.testing.assert_array_equal(out.samples, buf.samples)
    assert out.samples is not buf.samples


def test_resample_zero_rate():
    with pytest.raises(InvalidRate):
        resample(AudioBuffer(np.zeros(10), 8000), 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30000), st.sampled_from([8000, 16000, 22050, 24000, 44100, 48000]),
       st.sampled_from([8000, 16000, 22050, 44100]))
def test_length_law(n, r_in, r_out):
    out = resample(AudioBuffer(np.zeros(n), r_in), r_out)
    assert abs(len(out) - n * r_out / r_in) <= 1


def test_44k_second_to_22k():
    out = resample(AudioBuffer(np.zeros(44100), 44100), 22050)
    assert abs(len(out) - 22050) <= 1


def _sine(freq, sr, n, amp=0.5):
    return amp * np.sin(2 * np.pi * freq * np.arange(n) / sr)


def test_sine_fidelity():
    out = resample(AudioBuffer(_sine(440, 44100, 44100), 44100), 22050)
    y = out.samples.astype(np.float64)
    ideal = _sine(440, 22050, len(y))
    spectrum = np.abs(np.fft.rfft(y))
    assert np.argmax(spectrum) * 22050 / len(y) == pytest.approx(440, abs=22050 / len(y))
    snr = 10 * np.log10(np.sum(ideal ** 2) / np.sum((y - ideal) ** 2))
    assert snr >= 60


@pytest.mark.parametrize("freq", [14000, 16000, 20000])
def test_downsampling_suppresses_aliases(freq):
    src = _sine(freq, 44100, 44100)
    out = resample(AudioBuffer(src, 44100), 22050).samples.astype(np.float64)
    edge = 64  # start-up transient of the filter
    ratio_db = 10 * np.log10(np.mean(out[edge:-edge] ** 2) / np.mean(src ** 2))
    assert ratio_db < -50


def test_upsampling_keeps_tone():
    out = resample(AudioBuffer(_sine(1000, 16000, 16000), 16000), 22050).samples.astype(np.float64)
    ideal = _sine(1000, 22050, len(out))
    assert 10 * np.log10(np.sum(ideal ** 2) / np.sum((out - ideal) ** 2)) >= 60
