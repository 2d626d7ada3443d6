from django.apps import AppConfig


class XorcodecConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'xorcodec'
    verbose_name = 'Fixed-to-fixed XOR-gate codec'

    def ready(self):
        from .engine import initialize_encoders

        initialize_encoders()
