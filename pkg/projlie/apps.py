from django.apps import AppConfig


class ProjlieConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "projlie"
    verbose_name = "Projective vector field verification"
