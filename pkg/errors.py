# errors.py
# -*- coding: utf-8 -*-
"""
DMVFC hata sınıfları.
Kütüphane kodu bunları fırlatır; çıkış kodlarına yalnızca cli.py çevirir.
"""


class DMVFCError(Exception):
    """Tüm DMVFC hatalarının tabanı"""


class DatasetError(DMVFCError):
    """Dizin bir FSET v1 dataset değil"""


class FormatError(DatasetError):
    """Dataset dosyalarında bozuk kayıt"""


class ParameterError(DMVFCError, ValueError):
    """Geçersiz parametre / ön koşul ihlali"""


class ConfigError(ParameterError):
    """Bilinmeyen ya da geçersiz config anahtarı"""


class DegenerateInputError(ParameterError):
    """Sıfır uzunluklu fiber gibi dejenere girdi"""


class RankError(DMVFCError):
    """İstenen PCA bileşen sayısı veri rank'ını aşıyor"""


class DegenerateSignalError(DMVFCError):
    """Sabit (sıfır varyanslı) sinyal"""


class DivergenceError(DMVFCError):
    """Eğitim kaybı NaN/Inf oldu"""


class DegenerateClusterError(DMVFCError):
    """Bir cluster'ın soft kütlesi sıfıra düştü"""


class InfiniteLossError(DMVFCError):
    """KL: p > 0 iken q = 0"""


class InputError(DMVFCError):
    """Model girdisi eksik (ör. endpoint sinyali yok)"""


class ModelError(DMVFCError):
    """Checkpoint / model uyumsuzluğu"""
