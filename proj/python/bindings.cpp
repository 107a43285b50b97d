// Python module: the core operations (framing, modulation, channel,
// demodulation, analysis, WAV I/O) with native-feeling exceptions.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ultrafsk/analysis.hpp"
#include "ultrafsk/channel.hpp"
#include "ultrafsk/config.hpp"
#include "ultrafsk/demodulator.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/frame.hpp"
#include "ultrafsk/modulator.hpp"
#include "ultrafsk/wav.hpp"

namespace py = pybind11;
using namespace ultrafsk;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "ultrasonic B-FSK modem and acoustic channel simulator";
    mod.attr("__version__") = kVersion;

    // ---------------------------------------------------------- exceptions
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DomainError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const LengthMismatchError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DegenerateFitError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const TooShortError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    // --------------------------------------------------------------- types
    py::class_<Waveform>(mod, "Waveform")
        .def(py::init<>())
        .def_readwrite("samples", &Waveform::samples)
        .def_readwrite("sample_rate", &Waveform::sample_rate)
        .def("__len__", [](const Waveform& w) { return w.size(); });

    py::class_<ModemConfig>(mod, "ModemConfig")
        .def(py::init<>())
        .def_readwrite("f0", &ModemConfig::f0)
        .def_readwrite("f1", &ModemConfig::f1)
        .def_readwrite("symbol_duration", &ModemConfig::symbol_duration)
        .def_readwrite("sample_rate", &ModemConfig::sample_rate)
        .def_readwrite("band_low", &ModemConfig::band_low)
        .def_readwrite("band_high", &ModemConfig::band_high)
        .def_readwrite("amplitude", &ModemConfig::amplitude)
        .def_readwrite("ramp_duration", &ModemConfig::ramp_duration)
        .def("samples_per_symbol", &ModemConfig::samples_per_symbol)
        .def("midpoint_hz", &ModemConfig::midpoint_hz)
        .def("validate", &ModemConfig::validate);

    py::enum_<TransmitterKind>(mod, "TransmitterKind")
        .value("ACTIVE_SPEAKER", TransmitterKind::ActiveSpeaker)
        .value("PASSIVE_SPEAKER", TransmitterKind::PassiveSpeaker)
        .value("LAPTOP", TransmitterKind::Laptop);

    py::class_<TransmitterSpec>(mod, "TransmitterSpec")
        .def(py::init<>())
        .def_readwrite("power_db", &TransmitterSpec::power_db)
        .def_readwrite("kind", &TransmitterSpec::kind);

    py::enum_<Occlusion>(mod, "Occlusion")
        .value("LINE_OF_SIGHT", Occlusion::LineOfSight)
        .value("PARTIAL", Occlusion::Partial)
        .value("COMPLETE", Occlusion::Complete);

    py::class_<NoiseSource> noise(mod, "NoiseSource");
    py::enum_<NoiseSource::Kind>(noise, "Kind")
        .value("WHITE_GAUSSIAN", NoiseSource::Kind::WhiteGaussian)
        .value("BAND_LIMITED", NoiseSource::Kind::BandLimited);
    noise.def(py::init<>())
        .def_readwrite("kind", &NoiseSource::kind)
        .def_readwrite("band_low", &NoiseSource::band_low)
        .def_readwrite("band_high", &NoiseSource::band_high)
        .def_readwrite("level_db", &NoiseSource::level_db);

    py::class_<AttenuationCurve>(mod, "AttenuationCurve")
        .def(py::init<>())
        .def_readwrite("points", &AttenuationCurve::points)
        .def("at", &AttenuationCurve::at)
        .def_static("constant", &AttenuationCurve::constant);

    py::class_<ChannelProfile>(mod, "ChannelProfile")
        .def(py::init<>())
        .def_readwrite("distance_m", &ChannelProfile::distance_m)
        .def_readwrite("path_loss_exponent", &ChannelProfile::path_loss_exponent)
        .def_readwrite("attenuation", &ChannelProfile::attenuation)
        .def_readwrite("alpha_ref_hz", &ChannelProfile::alpha_ref_hz)
        .def_readwrite("occlusion", &ChannelProfile::occlusion)
        .def_readwrite("sample_occlusion", &ChannelProfile::sample_occlusion)
        .def_readwrite("los_baseline_loss", &ChannelProfile::los_baseline_loss)
        .def_readwrite("orientation_deg", &ChannelProfile::orientation_deg)
        .def_readwrite("doppler_offset_hz", &ChannelProfile::doppler_offset_hz)
        .def_readwrite("noise", &ChannelProfile::noise)
        .def_readwrite("seed", &ChannelProfile::seed);

    py::class_<ChannelResult>(mod, "ChannelResult")
        .def_readonly("output", &ChannelResult::output)
        .def_readonly("clipped_samples", &ChannelResult::clipped_samples)
        .def_readonly("gain_db", &ChannelResult::gain_db)
        .def_readonly("occlusion_penalty_db", &ChannelResult::occlusion_penalty_db)
        .def_readonly("received_level_db", &ChannelResult::received_level_db);

    py::class_<ReceiverConfig>(mod, "ReceiverConfig")
        .def(py::init<>())
        .def_readwrite("modem", &ReceiverConfig::modem)
        .def_readwrite("fft_size", &ReceiverConfig::fft_size)
        .def_readwrite("hop", &ReceiverConfig::hop)
        .def_readwrite("classify_tolerance_hz", &ReceiverConfig::classify_tolerance_hz)
        .def_readwrite("noise_estimate_duration", &ReceiverConfig::noise_estimate_duration)
        .def_readwrite("kalman_process_var", &ReceiverConfig::kalman_process_var)
        .def_readwrite("kalman_measurement_var", &ReceiverConfig::kalman_measurement_var)
        .def_readwrite("filter_order", &ReceiverConfig::filter_order)
        .def_readwrite("peak_floor_db", &ReceiverConfig::peak_floor_db)
        .def("resolved_fft_size", &ReceiverConfig::resolved_fft_size)
        .def("resolved_hop", &ReceiverConfig::resolved_hop);

    py::class_<FrameParse>(mod, "FrameParse")
        .def_readonly("payload", &FrameParse::payload)
        .def("ok", &FrameParse::ok);

    py::class_<IntegrityFailure>(mod, "IntegrityFailure")
        .def_readonly("symbol_index", &IntegrityFailure::symbol_index)
        .def_readonly("erasure", &IntegrityFailure::erasure);

    py::class_<DecodeReport>(mod, "DecodeReport")
        .def_readonly("payloads", &DecodeReport::payloads)
        .def_readonly("sync_offset_samples", &DecodeReport::sync_offset_samples)
        .def_readonly("estimated_snr_db", &DecodeReport::estimated_snr_db)
        .def_readonly("align_offset_frames", &DecodeReport::align_offset_frames)
        .def_readonly("errors", &DecodeReport::errors);

    py::class_<Detection>(mod, "Detection")
        .def_readonly("t_start_s", &Detection::t_start_s)
        .def_readonly("t_end_s", &Detection::t_end_s)
        .def_readonly("peak_hz", &Detection::peak_hz)
        .def("__repr__", [](const Detection& d) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "Detection(%.3fs..%.3fs, %.0f Hz)",
                          d.t_start_s, d.t_end_s, d.peak_hz);
            return std::string(buf);
        });

    // ----------------------------------------------------------- operations
    mod.def("crc8", py::overload_cast<uint16_t>(&crc8), py::arg("payload"));
    mod.def("build_frame", &build_frame, py::arg("payload"));
    mod.def("parse_frame", &parse_frame, py::arg("bits"));
    mod.def("payloads_from_bytes",
            [](py::bytes data) {
                std::string s = data;
                return payloads_from_bytes(std::vector<uint8_t>(s.begin(), s.end()));
            },
            py::arg("data"));
    mod.def("bytes_from_payloads",
            [](const std::vector<uint16_t>& payloads) {
                std::vector<uint8_t> v = bytes_from_payloads(payloads);
                return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
            },
            py::arg("payloads"));

    mod.def("bit_rate_to_symbol_duration", &bit_rate_to_symbol_duration,
            py::arg("bits_per_second"), py::arg("sample_rate") = 48000.0);
    mod.def("modulate", &modulate, py::arg("bits"), py::arg("config"));
    mod.def("sweep", &sweep, py::arg("config"), py::arg("f_start"), py::arg("f_end"),
            py::arg("duration_s"));

    mod.def("apply_channel", &apply_channel, py::arg("waveform"), py::arg("profile"),
            py::arg("tx") = TransmitterSpec{});
    mod.def("keyboard_noise", &keyboard_noise, py::arg("duration_s"),
            py::arg("sample_rate"), py::arg("level_db"), py::arg("seed"));
    mod.def("attenuate_db", &attenuate_db, py::arg("a0_db"), py::arg("alpha_db_per_m"),
            py::arg("distance_m"), py::arg("occlusion") = Occlusion::LineOfSight);
    mod.def("snr_at_distance", &snr_at_distance, py::arg("snr_ref_db"), py::arg("gamma"),
            py::arg("distance_m"));

    mod.def("decode", &decode, py::arg("waveform"), py::arg("config"));
    mod.def("message_ber", &message_ber, py::arg("truth"), py::arg("decoded"));

    mod.def("q_function", &q_function, py::arg("x"));
    mod.def("ber_theoretical", &ber_theoretical, py::arg("snr_linear"));
    mod.def("ber_theoretical_db", &ber_theoretical_db, py::arg("snr_db"));
    mod.def("snr_inband", &snr_inband, py::arg("waveform"), py::arg("modem"));
    mod.def("snr_measure", &snr_measure, py::arg("waveform"), py::arg("signal_band"),
            py::arg("noise_band"));
    mod.def("detect_ultrasonic", &detect_ultrasonic, py::arg("waveform"), py::arg("band"),
            py::arg("threshold_db"), py::arg("fft_size") = size_t{2048},
            py::arg("hop") = size_t{512});

    mod.def("wav_write", &wav_write, py::arg("path"), py::arg("waveform"));
    mod.def("wav_read", &wav_read, py::arg("path"));
}
